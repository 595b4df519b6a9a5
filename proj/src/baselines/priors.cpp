#include "bogp/baselines/priors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bogp/errors.hpp"

namespace bogp {

namespace {

constexpr const char* kPriorSchema = "bogp-prior/1";

std::vector<std::size_t> even_indices(std::size_t length, std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < count; ++i)
    idx.push_back(static_cast<std::size_t>(std::llround(
        static_cast<double>(i) * static_cast<double>(length - 1) /
        static_cast<double>(count - 1))));
  return idx;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void PriorTable::validate() const {
  if (constant) {
    if (!std::isfinite(*constant)) throw InvalidInput("constant prior must be finite");
    return;
  }
  grid.validate();
}

BilinearGrid mirror(const BilinearGrid& g) {
  BilinearGrid out = g;
  if (g.values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
  const double s = *lo + *hi;
  for (double& v : out.values) v = s - v;
  return out;
}

PriorTable build_prior(const olpc::SurfaceTable& surface,
                       std::optional<std::size_t> subsample_n,
                       PriorTransform transform, double constant,
                       std::string source) {
  PriorTable t;
  t.source = std::move(source);
  if (transform == PriorTransform::kConstant) {
    if (!std::isfinite(constant)) throw InvalidInput("constant prior must be finite");
    t.constant = constant;
    return t;
  }
  const auto& av = olpc::alpha_values();
  const auto& pv = olpc::p0_values();
  if (surface.values.size() != av.size() * pv.size() ||
      surface.configs.size() != surface.values.size())
    throw InvalidInput("prior source surface must cover the full OLPC grid");
  for (std::size_t i = 0; i < surface.configs.size(); ++i)
    if (olpc::grid_index(surface.configs[i]) != i)
      throw InvalidInput("prior source surface is not in grid order");

  BilinearGrid full{av, pv, surface.values};
  if (transform == PriorTransform::kMirror) full = mirror(full);

  if (!subsample_n || *subsample_n >= full.values.size()) {
    t.grid = std::move(full);
    t.sample_count = t.grid.values.size();
    t.validate();
    return t;
  }
  const std::size_t n = *subsample_n;
  if (n < 4) throw InvalidInput("a subsampled prior needs at least 4 samples");
  std::size_t na = 0, np = 0;
  for (std::size_t m = n; m >= 4 && na == 0; --m)
    for (std::size_t a = 2; a <= av.size(); ++a)
      if (m % a == 0 && m / a >= 2 && m / a <= pv.size()) {
        na = a;
        np = m / a;
        break;
      }
  BilinearGrid sub;
  const auto ia = even_indices(av.size(), na);
  const auto ip = even_indices(pv.size(), np);
  for (std::size_t i : ia) sub.x_nodes.push_back(av[i]);
  for (std::size_t j : ip) sub.y_nodes.push_back(pv[j]);
  for (std::size_t i : ia)
    for (std::size_t j : ip) sub.values.push_back(full.at(i, j));
  t.grid = std::move(sub);
  t.sample_count = na * np;
  t.validate();
  return t;
}

MeanPrior prior_as_mean(const PriorTable& table) {
  table.validate();
  if (table.constant) return MeanPrior::constant(*table.constant);
  return MeanPrior::grid(table.grid);
}

void write_prior_csv(std::ostream& os, const PriorTable& table,
                     const std::string& config_json) {
  os << "# schema: " << kPriorSchema << "\n";
  if (!config_json.empty()) os << "# config: " << config_json << "\n";
  os << "# source: " << table.source << "\n";
  os << "# samples: " << table.sample_count << "\n";
  if (table.constant) os << "# constant: " << fmt17(*table.constant) << "\n";
  os << "alpha,p0,value\n";
  if (table.constant) return;
  const auto& g = table.grid;
  for (std::size_t i = 0; i < g.x_nodes.size(); ++i)
    for (std::size_t j = 0; j < g.y_nodes.size(); ++j)
      os << fmt17(g.x_nodes[i]) << ',' << fmt17(g.y_nodes[j]) << ','
         << fmt17(g.at(i, j)) << "\n";
}

PriorTable read_prior_csv(std::istream& is) {
  PriorTable t;
  std::string line;
  bool schema_ok = false, header = false;
  std::vector<double> xs, ys, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string val = line.substr(colon + 2);
      if (key == "schema") {
        if (val != kPriorSchema) throw InvalidInput("unknown prior CSV schema: " + val);
        schema_ok = true;
      } else if (key == "source") {
        t.source = val;
      } else if (key == "samples") {
        t.sample_count = std::stoul(val);
      } else if (key == "constant") {
        t.constant = std::stod(val);
      }
      continue;
    }
    if (!header) {
      if (line != "alpha,p0,value") throw InvalidInput("bad prior CSV header: " + line);
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string a, p, v;
    if (!std::getline(ss, a, ',') || !std::getline(ss, p, ',') || !std::getline(ss, v))
      throw InvalidInput("bad prior CSV row: " + line);
    xs.push_back(std::stod(a));
    ys.push_back(std::stod(p));
    vs.push_back(std::stod(v));
  }
  if (!schema_ok || !header) throw InvalidInput("prior CSV lacks schema or header");
  if (t.constant) return t;
  // Rows are x-major: the y column repeats with period n_y.
  std::size_t ny = 1;
  while (ny < ys.size() && ys[ny] != ys[0]) ++ny;
  if (ys.empty() || ys.size() % ny != 0) throw InvalidInput("prior CSV is not a grid");
  const std::size_t nx = ys.size() / ny;
  BilinearGrid g;
  for (std::size_t i = 0; i < nx; ++i) g.x_nodes.push_back(xs[i * ny]);
  g.y_nodes.assign(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(ny));
  for (std::size_t r = 0; r < xs.size(); ++r)
    if (xs[r] != g.x_nodes[r / ny] || ys[r] != g.y_nodes[r % ny])
      throw InvalidInput("prior CSV rows are not a full x-major grid");
  g.values = std::move(vs);
  t.grid = std::move(g);
  t.validate();
  return t;
}

}  // namespace bogp
