#include "adisplit/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace adisplit {

namespace {

struct GaussRule {
    std::array<double, 5> nodes{};
    std::array<double, 5> weights{};
    int count = 0;
};

// Gauss-Legendre on [0, 1].
GaussRule gauss_rule(int points)
{
    GaussRule rule;
    rule.count = points;
    auto set = [&rule](std::initializer_list<double> xs, std::initializer_list<double> ws) {
        int i = 0;
        for (double x : xs) {
            rule.nodes[i++] = 0.5 * (x + 1.0);
        }
        i = 0;
        for (double w : ws) {
            rule.weights[i++] = 0.5 * w;
        }
    };
    switch (points) {
    case 1:
        set({0.0}, {2.0});
        break;
    case 2: {
        const double a = 1.0 / std::sqrt(3.0);
        set({-a, a}, {1.0, 1.0});
        break;
    }
    case 3: {
        const double a = std::sqrt(0.6);
        set({-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0});
        break;
    }
    case 4: {
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        set({-b, -a, a, b}, {wb, wa, wa, wb});
        break;
    }
    case 5: {
        const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        set({-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb});
        break;
    }
    default:
        throw std::invalid_argument("gauss rule: points must be in [1, 5]");
    }
    return rule;
}

// Element index (0..m-1) and local coordinate in [0, 1] for a coordinate in
// [0, 1]; edges belong to the lower element.
std::pair<int, double> locate(int m, double x)
{
    const double scaled = x * m;
    int e = static_cast<int>(std::ceil(scaled)) - 1;
    e = std::clamp(e, 0, m - 1);
    return {e, scaled - e};
}

// Nodal value with zero boundary ring; node indices 0..m.
double node_value(const Field& u, int i, int j)
{
    const int m = u.grid().m();
    if (i <= 0 || j <= 0 || i >= m || j >= m) {
        return 0.0;
    }
    return u(i - 1, j - 1);
}

} // namespace

Grid::Grid(int m) : m_(m), h_(0.0)
{
    if (m < 2) {
        throw std::invalid_argument("grid: m must be at least 2, got " + std::to_string(m));
    }
    h_ = 1.0 / m;
}

Grid build_grid(int m)
{
    return Grid(m);
}

Field::Field(const Grid& grid) : grid_(grid), values_(grid.interior_count(), 0.0) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.interior_count()) {
        throw std::invalid_argument("field: expected " + std::to_string(grid_.interior_count()) +
                                    " values, got " + std::to_string(values_.size()));
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("field: non-finite value");
    }
}

void require_same_grid(const Field& a, const Field& b)
{
    if (!(a.grid() == b.grid())) {
        throw std::invalid_argument("grid mismatch: m=" + std::to_string(a.grid().m()) +
                                    " vs m=" + std::to_string(b.grid().m()));
    }
}

Field& Field::operator+=(const Field& other)
{
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += other.values_[k];
    }
    return *this;
}

Field& Field::operator-=(const Field& other)
{
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] -= other.values_[k];
    }
    return *this;
}

Field& Field::operator*=(double scale) noexcept
{
    for (double& v : values_) {
        v *= scale;
    }
    return *this;
}

Field& Field::add_scaled(double scale, const Field& other)
{
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += scale * other.values_[k];
    }
    return *this;
}

Field operator+(Field a, const Field& b)
{
    a += b;
    return a;
}

Field operator-(Field a, const Field& b)
{
    a -= b;
    return a;
}

Field operator*(double scale, Field a)
{
    a *= scale;
    return a;
}

double discrete_inner_product(const Field& u, const Field& v)
{
    require_same_grid(u, v);
    const auto a = u.values();
    const auto b = v.values();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sum += a[k] * b[k];
    }
    const double h = u.grid().h();
    return h * h * sum;
}

double discrete_norm(const Field& u)
{
    double sum = 0.0;
    for (double v : u.values()) {
        sum += v * v;
    }
    return u.grid().h() * std::sqrt(sum);
}

double max_norm(const Field& u)
{
    double best = 0.0;
    for (double v : u.values()) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

Field interpolate(const ScalarFunction2D& g, const Grid& grid)
{
    Field u(grid);
    const int n = grid.n();
    for (int j = 0; j < n; ++j) {
        const double y = grid.coordinate(j + 1);
        for (int i = 0; i < n; ++i) {
            u(i, j) = g(grid.coordinate(i + 1), y);
        }
    }
    return u;
}

double evaluate_field(const Field& u, double x, double y)
{
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
        throw std::invalid_argument("evaluate_field: point outside the unit square");
    }
    const int m = u.grid().m();
    const auto [ex, tx] = locate(m, x);
    const auto [ey, ty] = locate(m, y);
    const double v00 = node_value(u, ex, ey);
    const double v10 = node_value(u, ex + 1, ey);
    const double v01 = node_value(u, ex, ey + 1);
    const double v11 = node_value(u, ex + 1, ey + 1);
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

Field prolong_to(const Field& u, const Grid& fine)
{
    if (u.grid() == fine) {
        return u;
    }
    const int m = u.grid().m();
    const int n_fine = fine.n();
    std::vector<int> element(n_fine);
    std::vector<double> local(n_fine);
    for (int i = 0; i < n_fine; ++i) {
        const auto [e, t] = locate(m, fine.coordinate(i + 1));
        element[i] = e;
        local[i] = t;
    }
    Field out(fine);
    for (int j = 0; j < n_fine; ++j) {
        const int ey = element[j];
        const double ty = local[j];
        for (int i = 0; i < n_fine; ++i) {
            const int ex = element[i];
            const double tx = local[i];
            const double v00 = node_value(u, ex, ey);
            const double v10 = node_value(u, ex + 1, ey);
            const double v01 = node_value(u, ex, ey + 1);
            const double v11 = node_value(u, ex + 1, ey + 1);
            out(i, j) = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
        }
    }
    return out;
}

double l2_norm(const Field& u)
{
    const GaussRule rule = gauss_rule(2);
    const int m = u.grid().m();
    const double h = u.grid().h();
    double sum = 0.0;
    for (int ey = 0; ey < m; ++ey) {
        for (int ex = 0; ex < m; ++ex) {
            const double v00 = node_value(u, ex, ey);
            const double v10 = node_value(u, ex + 1, ey);
            const double v01 = node_value(u, ex, ey + 1);
            const double v11 = node_value(u, ex + 1, ey + 1);
            double element = 0.0;
            for (int q = 0; q < rule.count; ++q) {
                const double ty = rule.nodes[q];
                for (int p = 0; p < rule.count; ++p) {
                    const double tx = rule.nodes[p];
                    const double v = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
                    element += rule.weights[p] * rule.weights[q] * v * v;
                }
            }
            sum += element;
        }
    }
    return h * std::sqrt(sum);
}

double l2_distance(const Field& u, const ScalarFunction2D& g, int points)
{
    const GaussRule rule = gauss_rule(points);
    const int m = u.grid().m();
    const double h = u.grid().h();
    double sum = 0.0;
    for (int ey = 0; ey < m; ++ey) {
        for (int ex = 0; ex < m; ++ex) {
            const double v00 = node_value(u, ex, ey);
            const double v10 = node_value(u, ex + 1, ey);
            const double v01 = node_value(u, ex, ey + 1);
            const double v11 = node_value(u, ex + 1, ey + 1);
            double element = 0.0;
            for (int q = 0; q < rule.count; ++q) {
                const double ty = rule.nodes[q];
                const double y = (ey + ty) * h;
                for (int p = 0; p < rule.count; ++p) {
                    const double tx = rule.nodes[p];
                    const double x = (ex + tx) * h;
                    const double v = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
                    const double d = v - g(x, y);
                    element += rule.weights[p] * rule.weights[q] * d * d;
                }
            }
            sum += element;
        }
    }
    return h * std::sqrt(sum);
}

void write_field(std::ostream& out, const Field& u)
{
    out << u.grid().m() << '\n';
    out << std::setprecision(17);
    for (double v : u.values()) {
        out << v << '\n';
    }
}

Field read_field(std::istream& in)
{
    int m = 0;
    if (!(in >> m)) {
        throw std::runtime_error("field file: missing grid size");
    }
    Grid grid(m);
    std::vector<double> values(grid.interior_count());
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(in >> values[k])) {
            throw std::runtime_error("field file: expected " + std::to_string(values.size()) +
                                     " values, read " + std::to_string(k));
        }
    }
    return Field(grid, std::move(values));
}

void write_field_file(const std::string& path, const Field& u)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_field(out, u);
}

Field read_field_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_field(in);
}

} // namespace adisplit
