#include "ozonecast/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ozonecast/errors.hpp"

namespace ozonecast {

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end != it->second.c_str() + it->second.size()) {
        throw Error("config value " + key + "=" + it->second + " is not numeric");
    }
    return v;
}

int KeyValues::get_int(const std::string& key, int fallback) const {
    return static_cast<int>(get_double(key, fallback));
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    out << "approach=" << approach << '\n';
    out << "data=" << data << '\n';
    std::string model_list;
    for (const auto& m : models) {
        if (!model_list.empty()) model_list += ',';
        model_list += m;
    }
    out << "models=" << model_list << '\n';
    out << "out=" << this->out << '\n';
    out << "seed=" << seed << '\n';
    out << "split=" << (split.mode == SplitSpec::Mode::kChronological ? "chrono" : "random")
        << '\n';
    out << "split_seed=" << split.seed << '\n';
    out << "threads=" << threads << '\n';
    char frac[32];
    std::snprintf(frac, sizeof(frac), "%.17g", split.train_fraction);
    out << "train_frac=" << frac << '\n';
    for (const auto& [k, v] : overrides.items()) out << "set." << k << '=' << v << '\n';
    return out.str();
}

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key=value: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "approach") {
            cfg.approach = std::stoi(value);
        } else if (key == "data") {
            cfg.data = value;
        } else if (key == "models") {
            cfg.models.clear();
            std::istringstream ms(value);
            std::string m;
            while (std::getline(ms, m, ',')) {
                if (!m.empty()) cfg.models.push_back(m);
            }
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "split") {
            if (value == "chrono") {
                cfg.split.mode = SplitSpec::Mode::kChronological;
            } else if (value == "random") {
                cfg.split.mode = SplitSpec::Mode::kSeededRandom;
            } else {
                throw ParseError(line_no, "split must be chrono or random");
            }
        } else if (key == "split_seed") {
            cfg.split.seed = std::stoull(value);
        } else if (key == "threads") {
            cfg.threads = std::stoi(value);
        } else if (key == "train_frac") {
            cfg.split.train_fraction = std::stod(value);
        } else if (key.rfind("set.", 0) == 0) {
            cfg.overrides.set(key.substr(4), value);
        } else {
            throw ParseError(line_no, "unknown config key " + key);
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write config " + path.string());
    out << serialize();
}

std::string RunConfig::fingerprint() const {
    const std::string text = serialize();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace ozonecast
