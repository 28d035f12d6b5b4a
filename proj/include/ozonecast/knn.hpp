#pragma once

#include <Eigen/Dense>

#include "ozonecast/model.hpp"

namespace ozonecast {

/// K-nearest-neighbors regressor: unweighted mean of the targets of the k
/// nearest stored rows by Euclidean distance. Distance ties resolve to the
/// lower row index, and the selected targets are averaged in ascending row
/// order, making predictions exactly reproducible.
class KnnModel : public Regressor {
  public:
    Eigen::MatrixXd train_X;
    Eigen::VectorXd train_y;
    int k = 5;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
    double predict_row(const Eigen::RowVectorXd& x) const;
};

KnnModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k = 5);

}  // namespace ozonecast
