#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hutchfrac/errors.hpp"
#include "hutchfrac/point.hpp"

namespace hutchfrac {

class IfsSystem;

/// x -> matrix * x + offset, matrix stored row-major.
struct Affine {
  std::size_t dim = 0;
  std::vector<double> matrix;
  std::vector<double> offset;

  double at(std::size_t r, std::size_t c) const { return matrix[r * dim + c]; }
  bool operator==(const Affine&) const = default;
};

/// x -> min(hi, max(lo, slope * x + shift)) on the real line.
struct Clamp1D {
  double slope = 1.0;
  double shift = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Clamp1D&) const = default;
};

/// Closed registry of maps that need analytic knowledge beyond matrices.
enum class BuiltinName {
  EdelsteinExp,  ///< x -> x + exp(-x) on the real line
  Halving,       ///< x -> x / 2 in every coordinate, any dimension
};

struct Builtin {
  BuiltinName name = BuiltinName::Halving;
  std::vector<double> parameters;
  bool operator==(const Builtin&) const = default;
};

inline std::string_view builtin_name(BuiltinName n) {
  switch (n) {
    case BuiltinName::EdelsteinExp: return "edelstein_exp";
    case BuiltinName::Halving: return "halving";
  }
  return "?";
}

inline BuiltinName builtin_from_name(std::string_view name) {
  if (name == "edelstein_exp") return BuiltinName::EdelsteinExp;
  if (name == "halving") return BuiltinName::Halving;
  throw Error("unregistered builtin map '" + std::string(name) + "'");
}

/// Element of F^n as map indices; letters[0] is applied last.
struct Word {
  std::vector<std::size_t> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }

  Word operator+(const Word& tail) const {
    Word w = *this;
    w.letters.insert(w.letters.end(), tail.letters.begin(), tail.letters.end());
    return w;
  }

  Word repeated(std::size_t times) const {
    Word w;
    for (std::size_t i = 0; i < times; ++i) w.letters.insert(w.letters.end(), letters.begin(), letters.end());
    return w;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(letters[i]);
    }
    return s + ")";
  }

  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;
};

/// Composition of a base system's maps along a word.
struct WordComposite {
  std::shared_ptr<const IfsSystem> base;
  Word word;
  bool operator==(const WordComposite& o) const { return base == o.base && word == o.word; }
};

class MapDescriptor {
 public:
  using Kind = std::variant<Affine, Clamp1D, Builtin, WordComposite>;

  MapDescriptor(Kind kind) : kind_(std::move(kind)) { validate(); }  // NOLINT(google-explicit-constructor)

  static MapDescriptor affine(std::vector<std::vector<double>> rows, std::vector<double> offset) {
    Affine a;
    a.dim = rows.size();
    for (const auto& r : rows) {
      if (r.size() != a.dim) throw DimensionMismatch("affine matrix must be square");
      a.matrix.insert(a.matrix.end(), r.begin(), r.end());
    }
    a.offset = std::move(offset);
    return MapDescriptor(std::move(a));
  }

  /// scale * I + offset.
  static MapDescriptor similarity(double scale, std::vector<double> offset) {
    const std::size_t d = offset.size();
    Affine a{d, std::vector<double>(d * d, 0.0), std::move(offset)};
    for (std::size_t i = 0; i < d; ++i) a.matrix[i * d + i] = scale;
    return MapDescriptor(std::move(a));
  }

  static MapDescriptor clamp1d(double slope, double shift, double lo, double hi) {
    return MapDescriptor(Clamp1D{slope, shift, lo, hi});
  }

  static MapDescriptor builtin(std::string_view name, std::vector<double> parameters = {}) {
    return MapDescriptor(Builtin{builtin_from_name(name), std::move(parameters)});
  }

  static MapDescriptor word(std::shared_ptr<const IfsSystem> base, Word w);

  const Kind& kind() const { return kind_; }

  /// Dimension the map acts on; nullopt for dimension-polymorphic builtins.
  std::optional<std::size_t> dim() const;

  bool operator==(const MapDescriptor&) const = default;

 private:
  void validate() const;

  Kind kind_;
};

/// A finite function system on a box of R^dim.
class IfsSystem {
 public:
  IfsSystem(std::size_t dim, std::vector<MapDescriptor> maps, DomainBox domain, bool self_mapping_declared = false,
            std::vector<std::string> map_names = {})
      : dim_(dim),
        maps_(std::move(maps)),
        domain_(std::move(domain)),
        self_mapping_(self_mapping_declared),
        names_(std::move(map_names)) {
    if (dim_ == 0) throw DimensionMismatch("system dimension must be positive");
    if (maps_.empty()) throw Error("function system needs at least one map");
    require_dim(dim_, domain_.dim(), "system domain");
    for (const auto& m : maps_)
      if (auto md = m.dim(); md && *md != dim_) require_dim(dim_, *md, "system map");
    if (!names_.empty() && names_.size() != maps_.size()) throw Error("map_names must name every map");
    if (self_mapping_) check_self_mapping();
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return maps_.size(); }
  const std::vector<MapDescriptor>& maps() const { return maps_; }
  const MapDescriptor& map(std::size_t i) const { return maps_.at(i); }
  const DomainBox& domain() const { return domain_; }
  bool self_mapping_declared() const { return self_mapping_; }
  const std::vector<std::string>& map_names() const { return names_; }

  std::string map_name(std::size_t i) const { return names_.empty() ? "f" + std::to_string(i) : names_.at(i); }

  /// The subsystem made of the listed maps, on the same box.
  IfsSystem subsystem(const std::vector<std::size_t>& indices) const {
    std::vector<MapDescriptor> maps;
    std::vector<std::string> names;
    for (auto i : indices) {
      maps.push_back(map(i));
      if (!names_.empty()) names.push_back(names_.at(i));
    }
    return IfsSystem(dim_, std::move(maps), domain_, self_mapping_, std::move(names));
  }

  /// Grid nodes per axis used by the self-mapping spot check.
  static std::size_t check_grid_per_axis(std::size_t dim) {
    std::size_t per = 2;
    while (std::pow(static_cast<double>(per + 1), static_cast<double>(dim)) <= 4096.0 && per < 65) ++per;
    return per;
  }

 private:
  void check_self_mapping() const;

  std::size_t dim_;
  std::vector<MapDescriptor> maps_;
  DomainBox domain_;
  bool self_mapping_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline void apply_affine(const Affine& a, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < a.dim; ++r) {
    double s = a.offset[r];
    for (std::size_t c = 0; c < a.dim; ++c) s += a.matrix[r * a.dim + c] * x[c];
    out[r] = s;
  }
}

inline double apply_clamp(const Clamp1D& c, double x) { return std::min(c.hi, std::max(c.lo, c.slope * x + c.shift)); }

}  // namespace detail

/// Applies `map` to x, writing into out (x and out must not alias).
inline void apply_map(const MapDescriptor& map, std::span<const double> x, std::span<double> out);

inline void apply_word(const IfsSystem& ifs, const Word& w, std::span<const double> x, std::span<double> out) {
  const std::size_t d = x.size();
  if (w.empty()) {
    std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  std::vector<double> a(x.begin(), x.end()), b(d);
  for (std::size_t k = w.size(); k-- > 0;) {
    apply_map(ifs.map(w.letters[k]), a, b);
    a.swap(b);
  }
  std::copy(a.begin(), a.end(), out.begin());
}

inline void apply_map(const MapDescriptor& map, std::span<const double> x, std::span<double> out) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Affine>) {
          detail::apply_affine(m, x, out);
        } else if constexpr (std::is_same_v<T, Clamp1D>) {
          out[0] = detail::apply_clamp(m, x[0]);
        } else if constexpr (std::is_same_v<T, Builtin>) {
          switch (m.name) {
            case BuiltinName::EdelsteinExp: out[0] = x[0] + std::exp(-x[0]); break;
            case BuiltinName::Halving:
              for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * x[i];
              break;
          }
        } else {
          apply_word(*m.base, m.word, x, out);
        }
      },
      map.kind());
}

/// Exact image f(x).
inline Point eval_map(const MapDescriptor& map, const Point& x) {
  if (auto d = map.dim()) require_dim(*d, x.dim(), "eval_map");
  std::vector<double> out(x.dim());
  apply_map(map, x.coords(), out);
  return Point(std::move(out));
}

inline void check_word(const IfsSystem& ifs, const Word& w) {
  for (auto l : w.letters)
    if (l >= ifs.size())
      throw Error("word letter " + std::to_string(l) + " out of range for a system of " + std::to_string(ifs.size()) +
                  " maps");
}

/// f_{w[0]} o ... o f_{w[n-1]} (x); the empty word is the identity.
inline Point eval_word(const IfsSystem& ifs, const Word& w, const Point& x) {
  check_word(ifs, w);
  require_dim(ifs.dim(), x.dim(), "eval_word");
  std::vector<double> out(x.dim());
  apply_word(ifs, w, x.coords(), out);
  return Point(std::move(out));
}

inline constexpr std::size_t kDefaultWordBudget = std::size_t{1} << 21;

inline std::size_t word_count(std::size_t maps, std::size_t n, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / std::max<std::size_t>(maps, 1)) return cap + 1;
    total *= maps;
  }
  return total;
}

/// All |F|^n words of length n in lexicographic order.
inline std::vector<Word> enumerate_words(const IfsSystem& ifs, std::size_t n, std::size_t budget = kDefaultWordBudget) {
  const std::size_t m = ifs.size();
  const std::size_t total = word_count(m, n, budget);
  if (total > budget)
    throw BudgetExceeded(std::to_string(m) + "^" + std::to_string(n) + " words exceed the budget of " +
                         std::to_string(budget) + "; lower the depth");
  std::vector<Word> out;
  out.reserve(total);
  Word w{std::vector<std::size_t>(n, 0)};
  for (std::size_t k = 0; k < total; ++k) {
    out.push_back(w);
    for (std::size_t i = n; i-- > 0;) {
      if (++w.letters[i] < m) break;
      w.letters[i] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Out-of-line members

inline MapDescriptor MapDescriptor::word(std::shared_ptr<const IfsSystem> base, Word w) {
  if (!base) throw Error("word composite needs a base system");
  check_word(*base, w);
  return MapDescriptor(WordComposite{std::move(base), std::move(w)});
}

inline std::optional<std::size_t> MapDescriptor::dim() const {
  return std::visit(
      [](const auto& m) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Affine>) {
          return m.dim;
        } else if constexpr (std::is_same_v<T, Clamp1D>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Builtin>) {
          if (m.name == BuiltinName::EdelsteinExp) return 1;
          return std::nullopt;
        } else {
          return m.base->dim();
        }
      },
      kind_);
}

inline void MapDescriptor::validate() const {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Affine>) {
          if (m.dim == 0 || m.matrix.size() != m.dim * m.dim || m.offset.size() != m.dim)
            throw DimensionMismatch("affine map needs a dim x dim matrix and a dim offset");
          for (double v : m.matrix)
            if (!std::isfinite(v)) throw Error("affine matrix entries must be finite");
          for (double v : m.offset)
            if (!std::isfinite(v)) throw Error("affine offset entries must be finite");
        } else if constexpr (std::is_same_v<T, Clamp1D>) {
          if (!(m.lo <= m.hi)) throw Error("clamp map requires lo <= hi");
          if (!std::isfinite(m.slope) || !std::isfinite(m.shift)) throw Error("clamp slope and shift must be finite");
        } else if constexpr (std::is_same_v<T, WordComposite>) {
          if (!m.base) throw Error("word composite needs a base system");
        }
      },
      kind_);
}

inline void IfsSystem::check_self_mapping() const {
  const auto grid = domain_.grid(check_grid_per_axis(dim_));
  std::vector<double> out(dim_);
  const double slack = domain_.escape_slack();
  for (std::size_t m = 0; m < maps_.size(); ++m) {
    for (std::size_t i = 0; i < grid.size(); i += dim_) {
      apply_map(maps_[m], {grid.data() + i, dim_}, out);
      if (!domain_.contains(out, slack))
        throw DomainEscape("map " + map_name(m) + " sends a grid point of the domain outside the declared box");
    }
  }
}

}  // namespace hutchfrac
