#include "causal/spacetime.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "causal/jacobian.hpp"

namespace causal {

DefinitionError::DefinitionError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

void SpacetimeDef::set_param(const std::string& id, double value) {
  for (auto& [k, v] : params)
    if (k == id) {
      v = value;
      return;
    }
  throw DefinitionError(0, "spacetime '" + name + "' has no parameter '" + id + "'");
}

namespace {

// ---------------------------------------------------------------------------
// Line-level parsing shared by the three definition kinds.

struct Entry {
  std::size_t line;
  std::string key;  // name, dim, param, metric, map, ...
  std::string arg;  // param id / coord name / "i,j" for metric
  std::string value;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  if (!start(s[0])) return false;
  for (char c : s)
    if (!start(c) && !std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

int parse_index(std::string_view s, std::size_t line) {
  int v = -1;
  const std::string t = trim(s);
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v < 0)
    throw DefinitionError(line, "bad index '" + t + "'");
  return v;
}

std::vector<Entry> tokenize(std::string_view text) {
  std::vector<Entry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DefinitionError(line_no, "expected '<key> = <value>'");
    const std::string lhs = trim(std::string_view(line).substr(0, eq));
    const std::string rhs = trim(std::string_view(line).substr(eq + 1));
    if (rhs.empty()) throw DefinitionError(line_no, "missing value");

    Entry e{line_no, "", "", rhs};
    if (lhs.rfind("metric", 0) == 0) {
      // metric[i][j]
      std::string rest = trim(std::string_view(lhs).substr(6));
      int idx[2];
      for (int k = 0; k < 2; ++k) {
        if (rest.empty() || rest[0] != '[') throw DefinitionError(line_no, "expected metric[<i>][<j>]");
        const auto close = rest.find(']');
        if (close == std::string::npos) throw DefinitionError(line_no, "expected ']'");
        idx[k] = parse_index(std::string_view(rest).substr(1, close - 1), line_no);
        rest = trim(std::string_view(rest).substr(close + 1));
      }
      if (!rest.empty()) throw DefinitionError(line_no, "trailing text after metric indices");
      e.key = "metric";
      e.arg = std::to_string(idx[0]) + "," + std::to_string(idx[1]);
    } else {
      std::istringstream ls(lhs);
      std::string key, arg, extra;
      ls >> key >> arg >> extra;
      if (!extra.empty()) throw DefinitionError(line_no, "unexpected '" + extra + "' before '='");
      e.key = key;
      e.arg = arg;
    }
    out.push_back(std::move(e));
    if (nl == text.size()) break;
  }
  return out;
}

// Top-level comma split (parentheses may nest inside items).
std::vector<std::string> split_list(std::string_view s, char open, char close, std::size_t line) {
  const std::string t = trim(s);
  if (t.size() < 2 || t.front() != open || t.back() != close)
    throw DefinitionError(line, std::string("expected a list in '") + open + "..." + close + "'");
  std::vector<std::string> items;
  int depth = 0;
  std::string cur;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const char c = t[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !items.empty()) items.push_back(trim(cur));
  for (const auto& it : items)
    if (it.empty()) throw DefinitionError(line, "empty list item");
  return items;
}

double parse_real(std::string_view s, std::size_t line) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    return eval(parse_expr(t, SymbolList{}), std::span<const double>{});
  } catch (const ExprError& e) {
    throw DefinitionError(line, std::string("bad number: ") + e.what());
  }
}

Interval parse_interval(std::string_view s, std::size_t line) {
  const std::string t = trim(s);
  if (t.empty()) throw DefinitionError(line, "missing interval");
  const char open = t.front();
  const char close = t.back();
  if ((open != '(' && open != '[') || (close != ')' && close != ']'))
    throw DefinitionError(line, "expected an interval '(<lo>, <hi>)'");
  const std::string body = "(" + t.substr(1, t.size() - 2) + ")";
  const auto items = split_list(body, '(', ')', line);
  if (items.size() != 2) throw DefinitionError(line, "interval needs exactly two bounds");
  Interval iv{parse_real(items[0], line), parse_real(items[1], line)};
  if (!(iv.lo < iv.hi)) throw DefinitionError(line, "interval lower bound must be below upper bound");
  return iv;
}

std::string parse_name(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

void add_param(std::vector<std::pair<std::string, double>>& params, const Entry& e) {
  if (!valid_identifier(e.arg) || is_reserved_name(e.arg)) throw DefinitionError(e.line, "bad parameter name '" + e.arg + "'");
  for (const auto& [k, v] : params)
    if (k == e.arg) throw DefinitionError(e.line, "duplicate parameter '" + e.arg + "'");
  params.emplace_back(e.arg, parse_real(e.value, e.line));
}

void require_no_arg(const Entry& e) {
  if (!e.arg.empty()) throw DefinitionError(e.line, "key '" + e.key + "' takes no argument");
}

void check_expr(const std::string& text, const SymbolList& symbols, std::size_t line) {
  try {
    (void)parse_expr(text, symbols);
  } catch (const ExprError& ex) {
    throw DefinitionError(line, ex.what());
  }
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string join(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ", ";
    s += items[i];
  }
  return s + "]";
}

SymbolList with_params(SymbolList syms, const std::vector<std::pair<std::string, double>>& params) {
  for (const auto& [k, v] : params) syms.push_back(k);
  return syms;
}

}  // namespace

// ---------------------------------------------------------------------------

SpacetimeDef parse_spacetime(std::string_view text) {
  SpacetimeDef def;
  std::optional<int> dim;
  std::size_t coords_line = 0;
  std::vector<std::pair<std::size_t, Entry>> deferred;  // need coords first
  std::size_t orientation_line = 0;
  for (const Entry& e : tokenize(text)) {
    if (e.key == "name") {
      require_no_arg(e);
      def.name = parse_name(e.value);
    } else if (e.key == "dim") {
      require_no_arg(e);
      dim = parse_index(e.value, e.line);
    } else if (e.key == "coords") {
      require_no_arg(e);
      def.coords = split_list(e.value, '[', ']', e.line);
      coords_line = e.line;
    } else if (e.key == "param") {
      add_param(def.params, e);
    } else if (e.key == "domain" || e.key == "window" || e.key == "metric") {
      deferred.emplace_back(e.line, e);
    } else if (e.key == "orientation") {
      require_no_arg(e);
      def.orientation = split_list(e.value, '[', ']', e.line);
      orientation_line = e.line;
    } else {
      throw DefinitionError(e.line, "unknown key '" + e.key + "' in spacetime definition");
    }
  }
  if (def.name.empty()) throw DefinitionError(0, "spacetime definition needs 'name'");
  if (def.coords.empty()) throw DefinitionError(0, "spacetime definition needs 'coords'");
  std::set<std::string> seen;
  for (const auto& c : def.coords) {
    if (!valid_identifier(c) || is_reserved_name(c)) throw DefinitionError(coords_line, "bad coordinate name '" + c + "'");
    if (!seen.insert(c).second) throw DefinitionError(coords_line, "duplicate coordinate '" + c + "'");
  }
  for (const auto& [k, v] : def.params)
    if (seen.count(k)) throw DefinitionError(0, "parameter '" + k + "' shadows a coordinate");
  if (dim && static_cast<std::size_t>(*dim) != def.coords.size())
    throw DefinitionError(coords_line, "dim = " + std::to_string(*dim) + " but " + std::to_string(def.coords.size()) + " coordinates");

  const std::size_t n = def.coords.size();
  const double inf = std::numeric_limits<double>::infinity();
  def.domain.assign(n, Interval{-inf, inf});
  def.window.assign(n, std::nullopt);
  auto coord_index = [&](const Entry& e) {
    for (std::size_t i = 0; i < n; ++i)
      if (def.coords[i] == e.arg) return i;
    throw DefinitionError(e.line, "unknown coordinate '" + e.arg + "'");
  };
  const SymbolList symbols = with_params(def.coords, def.params);
  for (const auto& [line, e] : deferred) {
    if (e.key == "domain") {
      def.domain[coord_index(e)] = parse_interval(e.value, line);
    } else if (e.key == "window") {
      def.window[coord_index(e)] = parse_interval(e.value, line);
    } else {
      const auto comma = e.arg.find(',');
      int i = std::stoi(e.arg.substr(0, comma));
      int j = std::stoi(e.arg.substr(comma + 1));
      if (static_cast<std::size_t>(std::max(i, j)) >= n) throw DefinitionError(line, "metric index out of range");
      if (i < j) std::swap(i, j);
      if (!def.metric.emplace(std::make_pair(i, j), e.value).second)
        throw DefinitionError(line, "duplicate metric component [" + std::to_string(i) + "][" + std::to_string(j) + "]");
      check_expr(e.value, symbols, line);
    }
  }
  if (def.orientation.empty())
    throw DefinitionError(0, "spacetime definition needs an explicit 'orientation' (future causal vector field)");
  if (def.orientation.size() != n)
    throw DefinitionError(orientation_line, "orientation needs " + std::to_string(n) + " components");
  for (const auto& o : def.orientation) check_expr(o, symbols, orientation_line);
  if (def.metric.empty()) throw DefinitionError(0, "spacetime definition has no metric components");
  return def;
}

namespace {

template <class Def>
void parse_map_like(std::string_view text, Def& def, bool flow) {
  for (const Entry& e : tokenize(text)) {
    if (e.key == "name") {
      require_no_arg(e);
      def.name = parse_name(e.value);
    } else if (e.key == "param") {
      add_param(def.params, e);
    } else if (e.key == "map") {
      if (!valid_identifier(e.arg)) throw DefinitionError(e.line, "bad target coordinate '" + e.arg + "'");
      for (const auto& [c, x] : def.exprs)
        if (c == e.arg) throw DefinitionError(e.line, "duplicate map entry for '" + e.arg + "'");
      def.exprs.emplace_back(e.arg, e.value);
    } else if constexpr (std::is_same_v<Def, MapDef>) {
      if (e.key == "source") {
        require_no_arg(e);
        def.source = parse_name(e.value);
      } else if (e.key == "target") {
        require_no_arg(e);
        def.target = parse_name(e.value);
      } else {
        throw DefinitionError(e.line, "unknown key '" + e.key + "' in map definition");
      }
    } else {
      if (e.key == "source" || e.key == "target" || e.key == "spacetime") {
        require_no_arg(e);
        const std::string v = parse_name(e.value);
        if (!def.spacetime.empty() && def.spacetime != v)
          throw DefinitionError(e.line, "a flow maps one spacetime to itself ('" + def.spacetime + "' vs '" + v + "')");
        def.spacetime = v;
      } else if (e.key == "flow_param") {
        require_no_arg(e);
        if (!valid_identifier(e.value) || is_reserved_name(e.value)) throw DefinitionError(e.line, "bad flow parameter '" + e.value + "'");
        def.s_symbol = e.value;
      } else if (e.key == "s_range") {
        require_no_arg(e);
        def.s_range = parse_interval(e.value, e.line);
      } else {
        throw DefinitionError(e.line, "unknown key '" + e.key + "' in flow definition");
      }
    }
  }
  (void)flow;
  if (def.exprs.empty()) throw DefinitionError(0, "definition has no 'map <coord> = <expr>' entries");
}

}  // namespace

MapDef parse_map(std::string_view text) {
  MapDef def;
  parse_map_like(text, def, false);
  if (def.source.empty() || def.target.empty()) throw DefinitionError(0, "map definition needs 'source' and 'target'");
  return def;
}

FlowDef parse_flow(std::string_view text) {
  FlowDef def;
  parse_map_like(text, def, true);
  if (def.spacetime.empty()) throw DefinitionError(0, "flow definition needs 'source' (or 'spacetime')");
  if (!(def.s_range.lo <= 0.0 && def.s_range.hi >= 0.0)) throw DefinitionError(0, "s_range must contain 0");
  return def;
}

std::string to_text(const SpacetimeDef& def) {
  std::ostringstream os;
  os << "name = " << def.name << "\n";
  os << "dim = " << def.dim() << "\n";
  os << "coords = " << join(def.coords) << "\n";
  for (const auto& [k, v] : def.params) os << "param " << k << " = " << format_real(v) << "\n";
  for (std::size_t i = 0; i < def.domain.size(); ++i) {
    const auto& d = def.domain[i];
    if (std::isinf(d.lo) && std::isinf(d.hi)) continue;
    os << "domain " << def.coords[i] << " = (" << format_real(d.lo) << ", " << format_real(d.hi) << ")\n";
  }
  for (std::size_t i = 0; i < def.window.size(); ++i)
    if (def.window[i])
      os << "window " << def.coords[i] << " = [" << format_real(def.window[i]->lo) << ", " << format_real(def.window[i]->hi) << "]\n";
  for (const auto& [ij, e] : def.metric) os << "metric[" << ij.first << "][" << ij.second << "] = " << e << "\n";
  os << "orientation = " << join(def.orientation) << "\n";
  return os.str();
}

std::string to_text(const MapDef& def) {
  std::ostringstream os;
  if (!def.name.empty()) os << "name = " << def.name << "\n";
  os << "source = " << def.source << "\n";
  os << "target = " << def.target << "\n";
  for (const auto& [k, v] : def.params) os << "param " << k << " = " << format_real(v) << "\n";
  for (const auto& [c, e] : def.exprs) os << "map " << c << " = " << e << "\n";
  return os.str();
}

std::string to_text(const FlowDef& def) {
  std::ostringstream os;
  if (!def.name.empty()) os << "name = " << def.name << "\n";
  os << "source = " << def.spacetime << "\n";
  os << "target = " << def.spacetime << "\n";
  os << "flow_param = " << def.s_symbol << "\n";
  os << "s_range = (" << format_real(def.s_range.lo) << ", " << format_real(def.s_range.hi) << ")\n";
  for (const auto& [k, v] : def.params) os << "param " << k << " = " << format_real(v) << "\n";
  for (const auto& [c, e] : def.exprs) os << "map " << c << " = " << e << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DefinitionError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Chart::Chart(SpacetimeDef def) : def_(std::move(def)) {
  const std::size_t n = def_.dim();
  if (n < 2) throw DefinitionError(0, "spacetime '" + def_.name + "' needs at least 2 coordinates");
  if (def_.domain.size() != n) {
    const double inf = std::numeric_limits<double>::infinity();
    def_.domain.resize(n, Interval{-inf, inf});
  }
  def_.window.resize(n);
  symbols_ = std::make_shared<const SymbolList>(with_params(def_.coords, def_.params));
  const Expr zero = Expr::constant(0.0, symbols_);
  metric_.assign(n * n, zero);
  for (const auto& [ij, text] : def_.metric) {
    const auto [i, j] = ij;
    if (static_cast<std::size_t>(std::max(i, j)) >= n) throw DefinitionError(0, "metric index out of range");
    Expr e;
    try {
      e = parse_expr(text, symbols_);
    } catch (const ExprError& ex) {
      throw DefinitionError(0, "metric[" + std::to_string(i) + "][" + std::to_string(j) + "]: " + ex.what());
    }
    metric_[i * n + j] = e;
    metric_[j * n + i] = e;
  }
  if (def_.orientation.size() != n) throw DefinitionError(0, "spacetime '" + def_.name + "' needs an orientation field with " + std::to_string(n) + " components");
  for (const auto& text : def_.orientation) {
    try {
      orientation_.push_back(parse_expr(text, symbols_));
    } catch (const ExprError& ex) {
      throw DefinitionError(0, std::string("orientation: ") + ex.what());
    }
  }
}

bool Chart::in_domain(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!def_.domain[i].contains_open(x[i])) return false;
  return true;
}

std::vector<double> Chart::bind(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("chart '" + name() + "': point has wrong dimension");
  std::vector<double> v(x.begin(), x.end());
  for (const auto& [k, val] : def_.params) v.push_back(val);
  return v;
}

Matrix Chart::metric_at(std::span<const double> x) const {
  const std::vector<double> vals = bind(x);
  const std::size_t n = dim();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = eval(metric_[i * n + j], vals);
  return g;
}

MetricJet Chart::metric_jet(std::span<const double> x) const {
  const std::vector<double> vals = bind(x);
  const std::size_t n = dim();
  std::vector<Dual> duals;
  for (std::size_t i = 0; i < vals.size(); ++i)
    duals.push_back(i < n ? Dual::variable(vals[i], i, n) : Dual::constant(vals[i], n));
  MetricJet jet{Matrix(n, n), std::vector<Matrix>(n, Matrix(n, n))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const Dual d = eval_dual(metric_[i * n + j], duals);
      jet.g(i, j) = jet.g(j, i) = d.value();
      for (std::size_t c = 0; c < n; ++c) jet.dg[c](i, j) = jet.dg[c](j, i) = d.d(c);
    }
  return jet;
}

Vector Chart::orientation_at(std::span<const double> x) const {
  const std::vector<double> vals = bind(x);
  Vector f(dim());
  for (std::size_t i = 0; i < dim(); ++i) f[i] = eval(orientation_[i], vals);
  return f;
}

OrientedPoint Chart::point_at(std::span<const double> x, double tol_null) const {
  Vector coords = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  return OrientedPoint(std::move(coords), validate_metric(metric_at(x)), orientation_at(x), tol_null);
}

RegionSampler Chart::sampler(const SamplerConfig& config) const { return RegionSampler(def_.domain, def_.window, config); }

// ---------------------------------------------------------------------------

BoundMap::BoundMap(MapDef def, std::shared_ptr<const Chart> source, std::shared_ptr<const Chart> target)
    : def_(std::move(def)), source_(std::move(source)), target_(std::move(target)) {
  if (!def_.source.empty() && def_.source != source_->name())
    throw DefinitionError(0, "map '" + def_.name + "' expects source '" + def_.source + "', got '" + source_->name() + "'");
  if (!def_.target.empty() && def_.target != target_->name())
    throw DefinitionError(0, "map '" + def_.name + "' expects target '" + def_.target + "', got '" + target_->name() + "'");
  if (source_->dim() != target_->dim()) throw DefinitionError(0, "map between charts of different dimension");

  auto symbols = std::make_shared<const SymbolList>(with_params(source_->def().coords, def_.params));
  const auto& tcoords = target_->def().coords;
  exprs_.resize(tcoords.size());
  std::vector<bool> have(tcoords.size(), false);
  for (const auto& [coord, text] : def_.exprs) {
    std::size_t idx = tcoords.size();
    for (std::size_t i = 0; i < tcoords.size(); ++i)
      if (tcoords[i] == coord) idx = i;
    if (idx == tcoords.size()) throw DefinitionError(0, "map entry for unknown target coordinate '" + coord + "'");
    try {
      exprs_[idx] = parse_expr(text, symbols);
    } catch (const ExprError& ex) {
      throw DefinitionError(0, "map " + coord + ": " + ex.what());
    }
    have[idx] = true;
  }
  for (std::size_t i = 0; i < have.size(); ++i)
    if (!have[i]) throw DefinitionError(0, "map gives no expression for target coordinate '" + tcoords[i] + "'");
  for (const auto& [k, v] : def_.params) param_values_.push_back(v);
}

std::vector<double> BoundMap::bind(std::span<const double> x) const {
  if (x.size() != source_->dim()) throw std::invalid_argument("map: point has wrong dimension");
  std::vector<double> v(x.begin(), x.end());
  v.insert(v.end(), param_values_.begin(), param_values_.end());
  return v;
}

std::vector<double> BoundMap::image(std::span<const double> x) const {
  const std::vector<double> vals = bind(x);
  std::vector<double> y(exprs_.size());
  for (std::size_t a = 0; a < exprs_.size(); ++a) y[a] = eval(exprs_[a], vals);
  return y;
}

Matrix BoundMap::jacobian(std::span<const double> x) const {
  const std::vector<double> vals = bind(x);
  Matrix j = causal::jacobian(exprs_, vals, source_->dim());
  if (is_singular(j)) throw SingularJacobian("singular Jacobian of map '" + def_.name + "'");
  return j;
}

SymTensor2 BoundMap::pullback(std::span<const double> x) const {
  if (!source_->in_domain(x)) throw DomainViolation("point outside the domain of '" + source_->name() + "'");
  const std::vector<double> y = image(x);
  if (!target_->in_domain(y)) throw DomainViolation("image outside the domain of '" + target_->name() + "'");
  const Matrix j = jacobian(x);
  const Matrix gt = target_->metric_at(y);
  return SymTensor2(j.transpose() * gt * j);
}

MapDef identity_map(const SpacetimeDef& source, const SpacetimeDef& target) {
  if (source.dim() != target.dim()) throw DefinitionError(0, "identity map between charts of different dimension");
  MapDef m;
  m.name = "identity";
  m.source = source.name;
  m.target = target.name;
  for (std::size_t i = 0; i < source.dim(); ++i) m.exprs.emplace_back(target.coords[i], source.coords[i]);
  return m;
}

}  // namespace causal
