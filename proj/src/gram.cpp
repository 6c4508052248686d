#include "kforge/gram.hpp"

#include <algorithm>

namespace kforge {

double GramMatrix::max_diagonal() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < n(); ++i) m = std::max(m, entries(i, i).real());
    return m;
}

RealMatrix real_embedding(const ComplexMatrix& g) {
    const Eigen::Index n = g.rows();
    RealMatrix e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = g.real();
    e.bottomRightCorner(n, n) = g.real();
    e.topRightCorner(n, n) = -g.imag();
    e.bottomLeftCorner(n, n) = g.imag();
    return e;
}

double inf_norm(const RealMatrix& m) {
    return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const ComplexMatrix& m) {
    return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace kforge
