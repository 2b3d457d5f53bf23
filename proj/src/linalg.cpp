#include "mf/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mf {

Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a, double tol, int max_sweeps)
{
    const Eigen::Index n = a.rows();
    if (n == 0)
        return {};
    const double scale = a.norm();
    if (scale == 0.0)
        return Eigen::VectorXd::Zero(n);
    const double target = tol * scale;

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index q = 1; q < n; ++q)
            for (Eigen::Index p = 0; p < q; ++p)
                s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    // rotations on entries this small cannot move the off-diagonal norm above target
    const double skip = target / static_cast<double>(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= target)
            break;
        for (Eigen::Index q = 1; q < n; ++q) {
            for (Eigen::Index p = 0; p < q; ++p) {
                const double apq = a(p, q);
                if (std::abs(apq) <= skip)
                    continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // A <- A J on columns p, q (contiguous), then mirror into rows p, q
                double* cp = a.col(p).data();
                double* cq = a.col(q).data();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double x = cp[k], y = cq[k];
                    cp[k] = c * x - s * y;
                    cq[k] = s * x + c * y;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    a(p, k) = cp[k];
                    a(q, k) = cq[k];
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
            }
        }
    }
    Eigen::VectorXd ev = a.diagonal();
    std::sort(ev.data(), ev.data() + n);
    return ev;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a, Eigen::Index jacobi_max_dim)
{
    if (a.rows() <= jacobi_max_dim)
        return jacobi_eigenvalues(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

CgResult conjugate_gradient(const LinearOperator& op, const Eigen::VectorXd& rhs, double tol,
                            int max_iterations)
{
    CgResult out;
    const Eigen::Index n = rhs.size();
    out.x = Eigen::VectorXd::Zero(n);
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = r;
    Eigen::VectorXd ap(n);
    double rr = r.squaredNorm();
    for (int it = 0; it < max_iterations; ++it) {
        if (std::sqrt(rr) <= tol * bnorm) {
            out.converged = true;
            break;
        }
        op(p, ap);
        const double pap = p.dot(ap);
        if (!(pap > 0.0))
            break;
        const double alpha = rr / pap;
        out.x += alpha * p;
        r -= alpha * ap;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
        out.iterations = it + 1;
    }
    // report the true residual, not the recursively updated one
    Eigen::VectorXd ax(n);
    op(out.x, ax);
    out.relative_residual = (rhs - ax).norm() / bnorm;
    if (!out.converged)
        out.converged = out.relative_residual <= tol;
    return out;
}

} // namespace mf
