#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace adisplit::oracle {

namespace {

void check_budget(const Grid& grid)
{
    if (grid.interior_count() > max_dense_unknowns) {
        throw std::invalid_argument("dense oracle: grid too large for dense assembly");
    }
}

DenseMatrix dense_tridiagonal(const TridiagonalMatrix& t)
{
    const auto n = static_cast<Eigen::Index>(t.size());
    DenseMatrix d = DenseMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = t.diag[i];
        if (i + 1 < n) {
            d(i + 1, i) = t.sub[i];
            d(i, i + 1) = t.super[i];
        }
    }
    return d;
}

// Entry ((i,j),(p,q)) = X(i,p) * Y(j,q) under the i-fastest node numbering.
DenseMatrix kron_x_then_y(const DenseMatrix& x, const DenseMatrix& y)
{
    const Eigen::Index n = x.rows();
    DenseMatrix out = DenseMatrix::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index q = 0; q < n; ++q) {
            if (y(j, q) == 0.0) {
                continue;
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index p = 0; p < n; ++p) {
                    out(i + j * n, p + q * n) = x(i, p) * y(j, q);
                }
            }
        }
    }
    return out;
}

DenseOperators from_factors(const DenseMatrix& k_lambda, const DenseMatrix& k_mu, const DenseMatrix& d_lambda,
                            const DenseMatrix& d_mu, double h)
{
    DenseOperators ops;
    const double scale = -1.0 / (h * h);
    ops.a = scale * kron_x_then_y(k_lambda, d_mu);
    ops.b = scale * kron_x_then_y(d_lambda, k_mu);
    ops.l = ops.a + ops.b;
    return ops;
}

DenseMatrix dense_diagonal(const ScalarFunction& c, const Grid& grid)
{
    const Eigen::Index n = grid.n();
    DenseMatrix d = DenseMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = c(static_cast<double>(i + 1) / grid.m());
    }
    return d;
}

} // namespace

DenseMatrix identity(Eigen::Index n)
{
    return DenseMatrix::Identity(n, n);
}

DenseOperators dense_assemble(const SplitDiffusionOperator& op)
{
    check_budget(op.grid());
    const Eigen::Index n = op.grid().n();
    DenseMatrix d_lambda = DenseMatrix::Zero(n, n);
    DenseMatrix d_mu = DenseMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d_lambda(i, i) = op.d_lambda().diag[i];
        d_mu(i, i) = op.d_mu().diag[i];
    }
    return from_factors(dense_tridiagonal(op.k_lambda()), dense_tridiagonal(op.k_mu()), d_lambda, d_mu,
                        op.grid().h());
}

DenseMatrix dense_stiffness_1d(const ScalarFunction& c, const Grid& grid)
{
    const int m = grid.m();
    // Full (m+1) x (m+1) matrix over all nodes, then drop the two boundary rows/columns.
    DenseMatrix full = DenseMatrix::Zero(m + 1, m + 1);
    for (int e = 0; e < m; ++e) {
        const double weight = (c(static_cast<double>(e) / m) + c(static_cast<double>(e + 1) / m)) / 2.0;
        full(e, e) += weight;
        full(e + 1, e + 1) += weight;
        full(e, e + 1) -= weight;
        full(e + 1, e) -= weight;
    }
    return full.block(1, 1, m - 1, m - 1);
}

DenseOperators dense_assemble(const ScalarFunction& lambda, const ScalarFunction& mu, const Grid& grid)
{
    check_budget(grid);
    return from_factors(dense_stiffness_1d(lambda, grid), dense_stiffness_1d(mu, grid), dense_diagonal(lambda, grid),
                        dense_diagonal(mu, grid), grid.h());
}

DenseMatrix dense_resolvent(const DenseMatrix& m, double kappa)
{
    const DenseMatrix shifted = identity(m.rows()) - kappa * m;
    return shifted.partialPivLu().inverse();
}

DenseMatrix dense_expm(const DenseMatrix& m, double t)
{
    const Eigen::Index n = m.rows();
    DenseMatrix scaled = t * m;
    const double norm = scaled.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.25) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    }
    scaled /= std::ldexp(1.0, squarings);
    // Taylor to degree 24: remainder below 0.25^25 / 25! at the scaled norm.
    DenseMatrix result = identity(n);
    DenseMatrix term = identity(n);
    for (int j = 1; j <= 24; ++j) {
        term = (term * scaled) / static_cast<double>(j);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) {
        result = (result * result).eval();
    }
    return result;
}

double dense_norm2(const DenseMatrix& m)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

double trapezoidal_inner_product(const Field& u, const Field& v)
{
    require_same_grid(u, v);
    const int m = u.grid().m();
    auto at = [m](const Field& f, int i, int j) {
        return (i == 0 || j == 0 || i == m || j == m) ? 0.0 : f(i - 1, j - 1);
    };
    const double h = u.grid().h();
    double sum = 0.0;
    for (int ey = 0; ey < m; ++ey) {
        for (int ex = 0; ex < m; ++ex) {
            double element = 0.0;
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = 0; dx <= 1; ++dx) {
                    element += at(u, ex + dx, ey + dy) * at(v, ex + dx, ey + dy);
                }
            }
            sum += h * h / 4.0 * element;
        }
    }
    return sum;
}

double exact_l2_norm(const Field& u)
{
    const int m = u.grid().m();
    auto at = [m, &u](int i, int j) { return (i == 0 || j == 0 || i == m || j == m) ? 0.0 : u(i - 1, j - 1); };
    // Element mass matrix for corners (00, 10, 01, 11): (h^2/36) [4 2 2 1; 2 4 1 2; 2 1 4 2; 1 2 2 4].
    static const double mass[4][4] = {{4, 2, 2, 1}, {2, 4, 1, 2}, {2, 1, 4, 2}, {1, 2, 2, 4}};
    const double h = u.grid().h();
    double sum = 0.0;
    for (int ey = 0; ey < m; ++ey) {
        for (int ex = 0; ex < m; ++ex) {
            const double c[4] = {at(ex, ey), at(ex + 1, ey), at(ex, ey + 1), at(ex + 1, ey + 1)};
            double q = 0.0;
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    q += c[a] * mass[a][b] * c[b];
                }
            }
            sum += q;
        }
    }
    return std::sqrt(h * h / 36.0 * sum);
}

double gauss_l2_norm(const Field& u)
{
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    const double nodes[4] = {0.5 * (1 - b), 0.5 * (1 - a), 0.5 * (1 + a), 0.5 * (1 + b)};
    const double weights[4] = {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb};
    const double h = u.grid().h();
    const int m = u.grid().m();
    double sum = 0.0;
    for (int ey = 0; ey < m; ++ey) {
        for (int ex = 0; ex < m; ++ex) {
            for (int q = 0; q < 4; ++q) {
                for (int p = 0; p < 4; ++p) {
                    const double v = evaluate_field(u, (ex + nodes[p]) * h, (ey + nodes[q]) * h);
                    sum += weights[p] * weights[q] * v * v;
                }
            }
        }
    }
    return h * std::sqrt(sum);
}

DenseVector to_vector(const Field& u)
{
    const auto values = u.values();
    return Eigen::Map<const DenseVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Field to_field(const Grid& grid, const DenseVector& v)
{
    return Field(grid, std::vector<double>(v.data(), v.data() + v.size()));
}

Field random_field(const Grid& grid, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(grid);
    for (double& v : u.values()) {
        v = dist(rng);
    }
    return u;
}

double relative_error(const Field& a, const Field& b)
{
    return relative_error(a, to_vector(b));
}

double relative_error(const Field& a, const DenseVector& b)
{
    const double diff = (to_vector(a) - b).norm();
    const double scale = b.norm();
    return scale == 0.0 ? diff : diff / scale;
}

} // namespace adisplit::oracle
