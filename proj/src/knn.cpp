#include "ozonecast/knn.hpp"

#include <algorithm>
#include <vector>

#include "ozonecast/errors.hpp"
#include "ozonecast/parallel.hpp"

namespace ozonecast {

KnnModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k) {
    if (X.rows() == 0) throw FitError("fit_knn: empty training set");
    if (X.rows() != y.size()) throw FitError("fit_knn: row count mismatch");
    if (k < 1 || k > X.rows()) throw FitError("fit_knn: k must be in [1, n]");
    KnnModel model;
    model.train_X = X;
    model.train_y = y;
    model.k = k;
    return model;
}

double KnnModel::predict_row(const Eigen::RowVectorXd& x) const {
    const Eigen::Index n = train_X.rows();
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        dist[static_cast<std::size_t>(i)] = {(train_X.row(i) - x).squaredNorm(),
                                             static_cast<int>(i)};
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    std::vector<int> chosen(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) chosen[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
    std::sort(chosen.begin(), chosen.end());
    double sum = 0.0;
    for (int i : chosen) sum += train_y[i];
    return sum / static_cast<double>(k);
}

Eigen::VectorXd KnnModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != train_X.cols()) {
        throw PredictError("knn: feature count mismatch");
    }
    Eigen::VectorXd out(X.rows());
    parallel_for(static_cast<std::size_t>(X.rows()), [&](std::size_t i) {
        out[static_cast<Eigen::Index>(i)] = predict_row(X.row(static_cast<Eigen::Index>(i)));
    });
    return out;
}

}  // namespace ozonecast
