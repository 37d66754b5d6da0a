#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace adisplit {

/// Uniform mesh on the unit square with m subintervals per direction.
///
/// Only the (m-1)^2 interior nodes carry unknowns; boundary values of every
/// field are zero and never stored.
class Grid {
public:
    explicit Grid(int m);

    int m() const noexcept { return m_; }
    double h() const noexcept { return h_; }
    /// Interior nodes per direction, m - 1.
    int n() const noexcept { return m_ - 1; }
    std::size_t interior_count() const noexcept
    {
        return static_cast<std::size_t>(n()) * static_cast<std::size_t>(n());
    }

    /// Node coordinate i/m for i = 0..m; x(0) == 0 and x(m) == 1 exactly.
    double coordinate(int i) const noexcept { return static_cast<double>(i) / m_; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.m_ == b.m_; }

private:
    int m_;
    double h_;
};

Grid build_grid(int m);

/// Coefficients of a piecewise-bilinear function vanishing on the boundary.
///
/// Storage is i-fastest: the value at interior node (x_{i+1}, y_{j+1}) lives at
/// index i + j*(m-1) with 0-based interior indices i, j.
class Field {
public:
    explicit Field(const Grid& grid);
    Field(const Grid& grid, std::vector<double> values);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(int i, int j) noexcept { return values_[index(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[index(i, j)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double scale) noexcept;

    /// this += scale * other
    Field& add_scaled(double scale, const Field& other);

private:
    std::size_t index(int i, int j) const noexcept
    {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.n());
    }

    Grid grid_;
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double scale, Field a);

void require_same_grid(const Field& a, const Field& b);

struct ScalarFunction {
    std::function<double(double)> f;
    std::string name;

    double operator()(double x) const { return f(x); }
};

struct ScalarFunction2D {
    std::function<double(double, double)> f;
    std::string name;

    double operator()(double x, double y) const { return f(x, y); }
};

/// (u, v)_h from element-wise trapezoidal quadrature. For fields vanishing on
/// the boundary this equals h^2 * sum(u*v), summed in storage order.
double discrete_inner_product(const Field& u, const Field& v);
double discrete_norm(const Field& u);
/// Nodal max |u|; equals the L-infinity norm of the bilinear function.
double max_norm(const Field& u);

/// Nodal interpolation onto the interior nodes.
Field interpolate(const ScalarFunction2D& g, const Grid& grid);

/// Exact value of the bilinear FE function at (x, y) in the closed unit square.
/// Points on element edges are assigned to the lower-left element.
double evaluate_field(const Field& u, double x, double y);

/// Nodal values of the coarse FE function at the interior nodes of `fine`.
/// The grids need not be nested.
Field prolong_to(const Field& u, const Grid& fine);

/// L2(Omega) norm of the bilinear function, integrated exactly with a 2x2
/// Gauss rule per element.
double l2_norm(const Field& u);

/// ||u - g||_{L2(Omega)} by tensor Gauss-Legendre quadrature with `points`
/// nodes per direction on each element (1 <= points <= 5).
double l2_distance(const Field& u, const ScalarFunction2D& g, int points = 5);

/// Text format: first line m, then (m-1)^2 values in storage order, one per line.
void write_field(std::ostream& out, const Field& u);
Field read_field(std::istream& in);
void write_field_file(const std::string& path, const Field& u);
Field read_field_file(const std::string& path);

} // namespace adisplit
