#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hutchfrac/errors.hpp"

namespace hutchfrac {

/// A point of a finite-dimensional real space. Immutable after construction;
/// every coordinate is finite.
class Point {
 public:
  Point() = default;

  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }

  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }

  explicit Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) { validate(); }

  static Point zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  bool operator==(const Point&) const = default;

 private:
  void validate() const {
    if (coords_.empty()) throw DimensionMismatch("point must have positive dimension");
    for (double c : coords_)
      if (!std::isfinite(c)) throw Error("point coordinates must be finite");
  }

  std::vector<double> coords_;
};

inline void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                            ", got " + std::to_string(got));
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Axis-aligned box housing the working compact set.
class DomainBox {
 public:
  DomainBox() = default;

  DomainBox(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    require_dim(lo_.dim(), hi_.dim(), "domain box");
    for (std::size_t i = 0; i < lo_.dim(); ++i)
      if (lo_[i] > hi_[i]) throw Error("domain box requires lo <= hi componentwise");
  }

  static DomainBox cube(std::size_t dim, double lo, double hi) {
    return DomainBox(Point(std::vector<double>(dim, lo)), Point(std::vector<double>(dim, hi)));
  }

  std::size_t dim() const { return lo_.dim(); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  double extent(std::size_t i) const { return hi_[i] - lo_[i]; }

  double diagonal() const { return euclidean_distance(lo_.coords(), hi_.coords()); }

  /// Tolerance used when deciding whether an image left the box.
  double escape_slack() const { return 1e-9 * std::max(1.0, diagonal()); }

  bool contains(std::span<const double> x, double slack = 0.0) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < lo_[i] - slack || x[i] > hi_[i] + slack) return false;
    return true;
  }

  /// Regular grid with `per_axis` nodes per coordinate (endpoints included),
  /// in lexicographic order with the last coordinate varying fastest.
  std::vector<double> grid(std::size_t per_axis) const {
    per_axis = std::max<std::size_t>(per_axis, 1);
    const std::size_t d = dim();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= per_axis;
    std::vector<double> out;
    out.reserve(total * d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
      for (std::size_t i = 0; i < d; ++i) {
        const double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
        out.push_back(idx[i] + 1 == per_axis && per_axis > 1 ? hi_[i] : lo_[i] + t * extent(i));
      }
      for (std::size_t i = d; i-- > 0;) {
        if (++idx[i] < per_axis) break;
        idx[i] = 0;
      }
    }
    return out;
  }

  std::vector<double> corners() const { return grid(2); }

  bool operator==(const DomainBox&) const = default;

 private:
  Point lo_;
  Point hi_;
};

/// Finite non-empty point set standing in for a compact set. Points are stored
/// contiguously; no two points lie within dedup_tol of each other (Euclidean).
class Cloud {
 public:
  Cloud() = default;

  /// Builds a cloud from flat coordinates, dropping points within dedup_tol of
  /// an earlier point. The first occurrence wins, so the result only depends on
  /// the input order.
  Cloud(std::size_t dim, std::vector<double> flat, double dedup_tol = 0.0) : dim_(dim), dedup_tol_(dedup_tol) {
    if (dim == 0) throw DimensionMismatch("cloud dimension must be positive");
    if (flat.empty() || flat.size() % dim != 0) throw Error("cloud must be non-empty with whole points");
    if (dedup_tol < 0.0) throw Error("dedup_tol must be nonnegative");
    for (double c : flat)
      if (!std::isfinite(c)) throw Error("cloud coordinates must be finite");
    data_ = dedup(dim, std::move(flat), dedup_tol);
  }

  static Cloud from_points(const std::vector<Point>& points, double dedup_tol = 0.0) {
    if (points.empty()) throw Error("cloud must be non-empty");
    std::vector<double> flat;
    flat.reserve(points.size() * points.front().dim());
    for (const auto& p : points) {
      require_dim(points.front().dim(), p.dim(), "cloud point");
      flat.insert(flat.end(), p.coords().begin(), p.coords().end());
    }
    return Cloud(points.front().dim(), std::move(flat), dedup_tol);
  }

  static Cloud single(const Point& p) { return Cloud(p.dim(), {p.coords().begin(), p.coords().end()}); }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  double dedup_tol() const { return dedup_tol_; }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  Point point(std::size_t i) const { return Point((*this)[i]); }
  const std::vector<double>& data() const { return data_; }

  std::vector<Point> points() const {
    std::vector<Point> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
    return out;
  }

  bool operator==(const Cloud&) const = default;

 private:
  static std::vector<double> dedup(std::size_t dim, std::vector<double> flat, double tol) {
    const std::size_t n = flat.size() / dim;
    std::vector<char> keep(n, 1);
    if (tol == 0.0) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      auto less = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < dim; ++k) {
          const double x = flat[a * dim + k], y = flat[b * dim + k];
          if (x != y) return x < y;
        }
        return a < b;
      };
      std::sort(order.begin(), order.end(), less);
      for (std::size_t i = 1; i < n; ++i) {
        const std::size_t a = order[i - 1], b = order[i];
        if (std::equal(flat.begin() + a * dim, flat.begin() + (a + 1) * dim, flat.begin() + b * dim))
          keep[b] = 0;
      }
    } else {
      // Hash grid with cell size tol; a duplicate lies in one of the 3^dim
      // neighbouring cells.
      struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& k) const {
          std::uint64_t h = 1469598103934665603ull;
          for (auto v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
          return static_cast<std::size_t>(h);
        }
      };
      std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, KeyHash> cells;
      cells.reserve(n);
      std::vector<std::int64_t> key(dim), probe(dim);
      std::vector<int> offset(dim);
      for (std::size_t i = 0; i < n; ++i) {
        const double* p = flat.data() + i * dim;
        for (std::size_t k = 0; k < dim; ++k) key[k] = static_cast<std::int64_t>(std::floor(p[k] / tol));
        bool duplicate = false;
        std::fill(offset.begin(), offset.end(), -1);
        while (!duplicate) {
          for (std::size_t k = 0; k < dim; ++k) probe[k] = key[k] + offset[k];
          if (auto it = cells.find(probe); it != cells.end()) {
            for (std::size_t j : it->second) {
              if (euclidean_distance({p, dim}, {flat.data() + j * dim, dim}) <= tol) {
                duplicate = true;
                break;
              }
            }
          }
          std::size_t k = 0;
          for (; k < dim; ++k) {
            if (++offset[k] <= 1) break;
            offset[k] = -1;
          }
          if (k == dim) break;
        }
        if (duplicate) {
          keep[i] = 0;
        } else {
          cells[key].push_back(i);
        }
      }
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep[i]) continue;
      if (out != i) std::copy_n(flat.begin() + i * dim, dim, flat.begin() + out * dim);
      ++out;
    }
    flat.resize(out * dim);
    return flat;
  }

  std::size_t dim_ = 0;
  std::vector<double> data_;
  double dedup_tol_ = 0.0;
};

/// Shortest-form decimal for messages and notes.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// "[lo0, hi0] x [lo1, hi1] x ..."
inline std::string format_box(const DomainBox& box) {
  std::string s;
  for (std::size_t k = 0; k < box.dim(); ++k) {
    if (k) s += " x ";
    s += "[" + format_number(box.lo()[k]) + ", " + format_number(box.hi()[k]) + "]";
  }
  return s;
}

/// Default dedup tolerance for clouds living in `box`.
inline double default_dedup_tol(const DomainBox& box) { return 1e-7 * box.diagonal(); }

}  // namespace hutchfrac
