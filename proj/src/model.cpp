#include "mayerkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mayerkit::model {

namespace {

bool lex_less(const Point& a, const Point& b) {
  for (int k = 0; k < a.dim; ++k) {
    if (a.coords[k] != b.coords[k]) return a.coords[k] < b.coords[k];
  }
  if (a.mark.has_value() != b.mark.has_value()) return b.mark.has_value();
  if (a.mark && b.mark) return *a.mark < *b.mark;
  return false;
}

double interpolate_clamped(const TabulatedRadial& tab, double d) {
  const auto& xs = tab.dist;
  const auto& ys = tab.value;
  if (d <= xs.front()) return ys.front();
  if (d >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), d);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  if (std::isinf(ys[lo]) || std::isinf(ys[hi])) {
    // A node at +inf extends a hard core up to the first finite node.
    return std::isinf(ys[lo]) && std::isinf(ys[hi]) ? kInf
           : std::isinf(ys[lo])                     ? kInf
                                                    : ys[hi];
  }
  const double w = (d - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

void check_table(const std::vector<double>& dist,
                 const std::vector<double>& value, bool nonnegative) {
  if (dist.empty() || dist.size() != value.size())
    throw contract_violation("radial table: need equal non-empty columns");
  if (dist.front() < 0.0)
    throw contract_violation("radial table: distances must be >= 0");
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (!(dist[i] > dist[i - 1]))
      throw contract_violation("radial table: distances must be increasing");
  for (double v : value) {
    if (std::isnan(v)) throw contract_violation("radial table: NaN value");
    if (nonnegative && v < 0.0)
      throw contract_violation("radial table: potential values must be >= 0");
  }
}

}  // namespace

Point make_point(std::initializer_list<double> coords,
                 std::optional<double> mark) {
  if (coords.size() < 1 || coords.size() > 3)
    throw contract_violation("point: dimension must be 1, 2 or 3");
  if (mark && *mark < 0.0)
    throw contract_violation("point: mark must be >= 0");
  Point p;
  p.dim = static_cast<int>(coords.size());
  int k = 0;
  for (double c : coords) p.coords[static_cast<std::size_t>(k++)] = c;
  p.mark = mark;
  return p;
}

double distance(const Point& a, const Point& b) {
  if (a.dim != b.dim) throw contract_violation("distance: dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < a.dim; ++k) {
    const double d = a.coords[static_cast<std::size_t>(k)] -
                     b.coords[static_cast<std::size_t>(k)];
    s += d * d;
  }
  return std::sqrt(s);
}

double Box::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k)
    v *= upper[static_cast<std::size_t>(k)] - lower[static_cast<std::size_t>(k)];
  return v;
}

bool Box::contains(const Point& p) const {
  if (p.dim != dim) return false;
  for (int k = 0; k < dim; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (p.coords[i] < lower[i] || p.coords[i] > upper[i]) return false;
  }
  return true;
}

Point Box::center() const {
  Point p;
  p.dim = dim;
  for (int k = 0; k < dim; ++k) {
    const auto i = static_cast<std::size_t>(k);
    p.coords[i] = 0.5 * (lower[i] + upper[i]);
  }
  return p;
}

double Box::max_side() const {
  double m = 0.0;
  for (int k = 0; k < dim; ++k) {
    const auto i = static_cast<std::size_t>(k);
    m = std::max(m, upper[i] - lower[i]);
  }
  return m;
}

Box make_box(std::initializer_list<double> lower,
             std::initializer_list<double> upper) {
  if (lower.size() != upper.size() || lower.size() < 1 || lower.size() > 3)
    throw contract_violation("box: bounds must share a dimension in {1,2,3}");
  Box b;
  b.dim = static_cast<int>(lower.size());
  int k = 0;
  for (double c : lower) b.lower[static_cast<std::size_t>(k++)] = c;
  k = 0;
  for (double c : upper) b.upper[static_cast<std::size_t>(k++)] = c;
  for (int i = 0; i < b.dim; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (!(b.upper[j] > b.lower[j]))
      throw contract_violation("box: upper must exceed lower in every axis");
  }
  return b;
}

// --- PairPotential ----------------------------------------------------------

PairPotential PairPotential::none() {
  PairPotential p;
  p.kind_ = std::monostate{};
  return p;
}

PairPotential PairPotential::hard_sphere(double exclusion_radius, double beta) {
  if (!(exclusion_radius > 0.0))
    throw contract_violation("hard sphere: exclusion radius must be > 0");
  if (beta < 0.0) throw contract_violation("potential: beta must be >= 0");
  PairPotential p;
  p.kind_ = HardSphere{exclusion_radius};
  p.beta_ = beta;
  return p;
}

PairPotential PairPotential::hard_sphere_mixture(double beta) {
  if (beta < 0.0) throw contract_violation("potential: beta must be >= 0");
  PairPotential p;
  p.kind_ = HardSphereMixture{};
  p.beta_ = beta;
  return p;
}

PairPotential PairPotential::tabulated(std::vector<double> dist,
                                       std::vector<double> value, double beta) {
  check_table(dist, value, /*nonnegative=*/true);
  if (beta < 0.0) throw contract_violation("potential: beta must be >= 0");
  PairPotential p;
  p.kind_ = TabulatedRadial{std::move(dist), std::move(value)};
  p.beta_ = beta;
  return p;
}

PairPotential PairPotential::tabulated_from_csv(const std::string& path,
                                                double beta) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open table: " + path);
  std::vector<double> dist, value;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw config_error("table row needs two comma-separated columns: " + line);
    try {
      std::size_t pos = 0;
      const double d = std::stod(a, &pos);
      const double v = (b.find("inf") != std::string::npos)
                           ? kInf
                           : std::stod(b);
      dist.push_back(d);
      value.push_back(v);
    } catch (const std::exception&) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw config_error("bad numeric row in table: " + line);
    }
    first = false;
  }
  try {
    return tabulated(std::move(dist), std::move(value), beta);
  } catch (const contract_violation& e) {
    throw config_error(std::string("table ") + path + ": " + e.what());
  }
}

PairPotential PairPotential::callback(
    std::function<double(const Point&, const Point&)> fn, double range,
    double beta) {
  if (!fn) throw contract_violation("potential callback: empty function");
  if (beta < 0.0) throw contract_violation("potential: beta must be >= 0");
  PairPotential p;
  p.kind_ = PairCallback{std::move(fn), range};
  p.beta_ = beta;
  return p;
}

double PairPotential::v(const Point& x, const Point& y) const {
  double raw = 0.0;
  if (std::holds_alternative<std::monostate>(kind_)) {
    return 0.0;
  } else if (const auto* hs = std::get_if<HardSphere>(&kind_)) {
    // Closed-ball convention: contact distance counts as overlap.
    raw = distance(x, y) <= hs->exclusion_radius ? kInf : 0.0;
  } else if (std::holds_alternative<HardSphereMixture>(kind_)) {
    if (!x.mark || !y.mark)
      throw contract_violation("hard sphere mixture: points need marks");
    raw = distance(x, y) <= *x.mark + *y.mark ? kInf : 0.0;
  } else if (const auto* tab = std::get_if<TabulatedRadial>(&kind_)) {
    raw = interpolate_clamped(*tab, distance(x, y));
  } else {
    const auto& cb = std::get<PairCallback>(kind_);
    raw = lex_less(y, x) ? cb.fn(y, x) : cb.fn(x, y);
    if (std::isnan(raw) || raw < 0.0)
      throw contract_violation("potential callback: value outside [0, +inf]");
  }
  if (std::isinf(raw)) return kInf;  // hard core is beta-invariant
  return beta_ * raw;
}

double PairPotential::range() const {
  if (std::holds_alternative<std::monostate>(kind_)) return 0.0;
  if (const auto* hs = std::get_if<HardSphere>(&kind_))
    return hs->exclusion_radius;
  if (const auto* tab = std::get_if<TabulatedRadial>(&kind_))
    return tab->dist.back();
  if (const auto* cb = std::get_if<PairCallback>(&kind_)) return cb->range;
  return kInf;  // mixture: depends on the mark law
}

bool PairPotential::is_hard_sphere() const {
  return std::holds_alternative<HardSphere>(kind_);
}

double PairPotential::hard_sphere_radius() const {
  if (!is_hard_sphere())
    throw contract_violation("hard_sphere_radius: not a hard-sphere potential");
  return std::get<HardSphere>(kind_).exclusion_radius;
}

double mayer_f(const PairPotential& pot, const Point& x, const Point& y) {
  const double v = pot.v(x, y);
  if (std::isinf(v)) return -1.0;
  if (v == 0.0) return 0.0;
  return std::expm1(-v);
}

double energy(const PairPotential& pot, std::span<const Point> cfg) {
  const std::size_t n = cfg.size();
  if (n < 2) return 0.0;
  std::vector<double> vals;
  vals.reserve(n * (n - 1) / 2);
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double v = pot.v(cfg[i], cfg[j]);
      if (std::isinf(v)) return kInf;
      vals.push_back(v);
    }
  }
  // Sorted accumulation: the sum depends only on the multiset of pair values,
  // hence is exactly permutation invariant.
  std::sort(vals.begin(), vals.end());
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

double interaction_field(const PairPotential& pot, const Point& x,
                         std::span<const Point> cfg) {
  std::vector<double> vals;
  vals.reserve(cfg.size());
  for (const Point& y : cfg) {
    const double v = pot.v(x, y);
    if (std::isinf(v)) return kInf;
    vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

// --- Kernel -----------------------------------------------------------------

Kernel Kernel::tabulated(std::vector<double> dist, std::vector<double> value,
                         double scale) {
  check_table(dist, value, /*nonnegative=*/false);
  Kernel k;
  k.kind_ = TabulatedRadial{std::move(dist), std::move(value)};
  k.scale_ = scale;
  return k;
}

Kernel Kernel::callback(std::function<double(const Point&, const Point&)> fn,
                        double range, double scale) {
  if (!fn) throw contract_violation("kernel callback: empty function");
  Kernel k;
  k.kind_ = PairCallback{std::move(fn), range};
  k.scale_ = scale;
  return k;
}

Kernel Kernel::constant(double value) {
  Kernel k;
  k.kind_ = std::monostate{};
  k.scale_ = value;
  return k;
}

double Kernel::u(const Point& x, const Point& y) const {
  if (std::holds_alternative<std::monostate>(kind_)) return scale_;
  if (const auto* tab = std::get_if<TabulatedRadial>(&kind_))
    return scale_ * interpolate_clamped(*tab, distance(x, y));
  const auto& cb = std::get<PairCallback>(kind_);
  const double raw = lex_less(y, x) ? cb.fn(y, x) : cb.fn(x, y);
  if (std::isnan(raw)) throw contract_violation("kernel callback: NaN value");
  return scale_ * raw;
}

double Kernel::range() const {
  if (std::holds_alternative<std::monostate>(kind_)) return kInf;
  if (const auto* tab = std::get_if<TabulatedRadial>(&kind_))
    return tab->dist.back();
  return std::get<PairCallback>(kind_).range;
}

// --- Activity ---------------------------------------------------------------

namespace {
void check_marks(const MarkLaw& m) {
  if (m.kind == MarkLaw::Kind::uniform && !(m.hi > m.lo && m.lo >= 0.0))
    throw contract_violation("mark law: need 0 <= lo < hi");
}
}  // namespace

Activity Activity::constant(double z, Box domain, MarkLaw marks) {
  if (!(z >= 0.0)) throw contract_violation("activity: z must be >= 0");
  check_marks(marks);
  Activity a;
  a.kind_ = z;
  a.domain_ = domain;
  a.marks_ = marks;
  return a;
}

Activity Activity::piecewise(std::vector<PiecewiseCell> cells, Box domain,
                             MarkLaw marks) {
  check_marks(marks);
  if (cells.empty()) throw contract_violation("activity: no cells");
  for (const auto& c : cells) {
    if (!(c.z >= 0.0)) throw contract_violation("activity: cell z must be >= 0");
    if (c.box.dim != domain.dim)
      throw contract_violation("activity: cell dimension mismatch");
    for (int k = 0; k < domain.dim; ++k) {
      const auto i = static_cast<std::size_t>(k);
      if (c.box.lower[i] < domain.lower[i] || c.box.upper[i] > domain.upper[i])
        throw contract_violation("activity: cell outside the domain");
    }
  }
  // Cells must not overlap (interiors disjoint); quadratic check is fine at
  // the supported cell counts.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      bool overlap = true;
      for (int k = 0; k < domain.dim; ++k) {
        const auto d = static_cast<std::size_t>(k);
        if (cells[i].box.upper[d] <= cells[j].box.lower[d] ||
            cells[j].box.upper[d] <= cells[i].box.lower[d]) {
          overlap = false;
          break;
        }
      }
      if (overlap) throw contract_violation("activity: overlapping cells");
    }
  }
  Activity a;
  a.kind_ = std::move(cells);
  a.domain_ = domain;
  a.marks_ = marks;
  return a;
}

Activity Activity::callback(std::function<double(const Point&)> fn,
                            double zmax, double mass, Box domain,
                            MarkLaw marks) {
  if (!fn) throw contract_violation("activity callback: empty function");
  if (!(zmax > 0.0) || !(mass >= 0.0))
    throw contract_violation("activity callback: need zmax > 0 and mass >= 0");
  check_marks(marks);
  Activity a;
  a.kind_ = CallbackData{std::move(fn), zmax, mass};
  a.domain_ = domain;
  a.marks_ = marks;
  return a;
}

double Activity::z(const Point& p) const {
  if (!domain_.contains(p)) return 0.0;
  if (const double* z0 = std::get_if<double>(&kind_)) return *z0;
  if (const auto* cells = std::get_if<std::vector<PiecewiseCell>>(&kind_)) {
    for (const auto& c : *cells)
      if (c.box.contains(p)) return c.z;
    return 0.0;
  }
  const auto& cb = std::get<CallbackData>(kind_);
  const double z = cb.fn(p);
  if (std::isnan(z) || z < 0.0 || z > cb.zmax)
    throw contract_violation("activity callback: value outside [0, zmax]");
  return z;
}

double Activity::mass() const {
  if (const double* z0 = std::get_if<double>(&kind_))
    return *z0 * domain_.volume();
  if (const auto* cells = std::get_if<std::vector<PiecewiseCell>>(&kind_)) {
    double m = 0.0;
    for (const auto& c : *cells) m += c.z * c.box.volume();
    return m;
  }
  return std::get<CallbackData>(kind_).mass;
}

bool Activity::is_constant() const {
  return std::holds_alternative<double>(kind_);
}

double Activity::constant_z() const {
  if (!is_constant())
    throw contract_violation("constant_z: activity is not constant");
  return std::get<double>(kind_);
}

const std::vector<PiecewiseCell>* Activity::cells() const {
  return std::get_if<std::vector<PiecewiseCell>>(&kind_);
}

const Activity::CallbackData* Activity::callback_data() const {
  return std::get_if<CallbackData>(&kind_);
}

}  // namespace mayerkit::model
