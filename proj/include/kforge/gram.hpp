#pragma once

#include "kforge/point.hpp"

#include <Eigen/Dense>

namespace kforge {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Hermitian matrix of kernel values on a finite point set.
struct GramMatrix {
    ComplexMatrix entries;
    SampleSet points;

    GramMatrix() = default;
    GramMatrix(ComplexMatrix m, SampleSet pts = {}) : entries(std::move(m)), points(std::move(pts)) {}

    static GramMatrix from_real(const RealMatrix& m) { return GramMatrix(m.cast<Complex>()); }

    [[nodiscard]] Eigen::Index n() const noexcept { return entries.rows(); }
    /// True when every imaginary part is exactly zero.
    [[nodiscard]] bool is_real() const { return (entries.imag().array() == 0.0).all(); }
    [[nodiscard]] RealMatrix real() const { return entries.real(); }
    [[nodiscard]] double max_diagonal() const;
};

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
RealMatrix real_embedding(const ComplexMatrix& g);

/// Max absolute row sum.
double inf_norm(const RealMatrix& m);
double inf_norm(const ComplexMatrix& m);

}  // namespace kforge
