#include "vr/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vr/rng.hpp"

namespace vr {

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.target_name = target_name;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
  Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    if (targets) t(static_cast<Eigen::Index>(i)) = (*targets)(rows[i]);
  }
  if (targets) out.targets = std::move(t);
  return out;
}

Split train_test_split(Eigen::Index n, double test_fraction, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("train_test_split: need at least two points");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("train_test_split: test_fraction must be in (0, 1)");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng = make_stream(seed, 0x5911);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto n_test = static_cast<Eigen::Index>(std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<Eigen::Index>(n_test, 1, n - 1);
  Split s;
  s.seed = seed;
  s.test.assign(perm.begin(), perm.begin() + n_test);
  s.train.assign(perm.begin() + n_test, perm.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

Standardizer Standardizer::fit(const Dataset& train) {
  if (train.size() < 2) throw std::invalid_argument("Standardizer: need at least two points");
  Standardizer s;
  const double n = static_cast<double>(train.size());
  s.mean = train.features.colwise().mean().transpose();
  s.sd = ((train.features.rowwise() - s.mean.transpose()).array().square().colwise().sum() / (n - 1.0))
             .sqrt()
             .transpose();
  for (Eigen::Index j = 0; j < s.sd.size(); ++j)
    if (!(s.sd(j) > 0.0)) s.sd(j) = 1.0;
  if (train.targets) {
    const Eigen::VectorXd& y = *train.targets;
    s.target_mean = y.mean();
    s.target_sd = std::sqrt((y.array() - s.target_mean).square().sum() / (n - 1.0));
    if (!(s.target_sd > 0.0)) s.target_sd = 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  if (data.dim() != mean.size()) throw std::invalid_argument("Standardizer: dimension mismatch");
  Dataset out = data;
  out.features = ((data.features.rowwise() - mean.transpose()).array().rowwise() /
                  sd.transpose().array())
                     .matrix();
  if (data.targets) out.targets = ((data.targets->array() - target_mean) / target_sd).matrix();
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::vector<std::string>& features,
                 const std::optional<std::string>& target) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset '" + path + "' has no header");
  const std::vector<std::string> header = split_line(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("dataset has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  Dataset out;
  std::vector<std::size_t> fcols;
  if (features.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (!target || header[c] != *target) {
        fcols.push_back(c);
        out.feature_names.push_back(header[c]);
      }
  } else {
    for (const auto& f : features) {
      fcols.push_back(column(f));
      out.feature_names.push_back(f);
    }
  }
  std::optional<std::size_t> tcol;
  if (target) {
    tcol = column(*target);
    out.target_name = *target;
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("dataset line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " cells");
    auto parse = [&](std::size_t c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[c].size() || cells[c].empty() || !std::isfinite(v))
        throw std::invalid_argument("dataset line " + std::to_string(line_no) + ", column '" +
                                    header[c] + "': not a finite number");
      return v;
    };
    std::vector<double> row;
    row.reserve(fcols.size());
    for (std::size_t c : fcols) row.push_back(parse(c));
    rows.push_back(std::move(row));
    if (tcol) ys.push_back(parse(*tcol));
  }
  if (rows.empty()) throw std::invalid_argument("dataset '" + path + "' has no rows");
  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fcols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < fcols.size(); ++j)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  if (tcol) out.targets = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset '" + path + "'");
  out.precision(17);
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    if (j) out << ',';
    out << (static_cast<std::size_t>(j) < data.feature_names.size() ? data.feature_names[static_cast<std::size_t>(j)]
                                                                    : "x" + std::to_string(j));
  }
  if (data.targets) out << ',' << (data.target_name.empty() ? "y" : data.target_name);
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      if (j) out << ',';
      out << data.features(i, j);
    }
    if (data.targets) out << ',' << (*data.targets)(i);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing dataset '" + path + "'");
}

Batch make_batch(const Dataset& data, std::span<const Eigen::Index> rows, double likelihood_scale) {
  Batch b;
  b.likelihood_scale = likelihood_scale;
  b.inputs.resize(data.dim(), static_cast<Eigen::Index>(rows.size()));
  if (data.targets) b.targets.resize(1, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    b.inputs.col(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]).transpose();
    if (data.targets) b.targets(0, static_cast<Eigen::Index>(i)) = (*data.targets)(rows[i]);
  }
  return b;
}

Batch make_batch(const Dataset& data) {
  Batch b;
  b.inputs = data.features.transpose();
  if (data.targets) b.targets = data.targets->transpose();
  return b;
}

Dataset make_regression_toy(Eigen::Index n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0x7e9);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  std::normal_distribution<double> normal;
  Dataset d;
  d.features.resize(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = unif(rng);
    d.features(i, 0) = x;
    y(i) = x * std::sin(x) + 0.3 * normal(rng);
  }
  d.targets = std::move(y);
  d.feature_names = {"x"};
  d.target_name = "y";
  return d;
}

namespace {

// 8 x 8 glyphs, '#' = on.
constexpr std::array<std::array<const char*, 8>, 10> kGlyphs = {{
    {"..####..", ".##..##.", ".##..##.", ".##..##.", ".##..##.", ".##..##.", "..####..", "........"},
    {"...##...", "..###...", "...##...", "...##...", "...##...", "...##...", "..####..", "........"},
    {"..####..", ".##..##.", ".....##.", "....##..", "...##...", "..##....", ".######.", "........"},
    {"..####..", ".##..##.", ".....##.", "...###..", ".....##.", ".##..##.", "..####..", "........"},
    {"....##..", "...###..", "..####..", ".##.##..", ".######.", "....##..", "....##..", "........"},
    {".######.", ".##.....", ".#####..", ".....##.", ".....##.", ".##..##.", "..####..", "........"},
    {"..####..", ".##.....", ".#####..", ".##..##.", ".##..##.", ".##..##.", "..####..", "........"},
    {".######.", ".....##.", "....##..", "...##...", "...##...", "...##...", "...##...", "........"},
    {"..####..", ".##..##.", ".##..##.", "..####..", ".##..##.", ".##..##.", "..####..", "........"},
    {"..####..", ".##..##.", ".##..##.", "..#####.", ".....##.", "....##..", "..###...", "........"},
}};

}  // namespace

Dataset make_binary_digits(Eigen::Index n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0xd161);
  std::uniform_int_distribution<int> digit(0, 9);
  std::uniform_int_distribution<int> shift(-1, 1);
  std::bernoulli_distribution flip(0.05);
  Dataset d;
  d.features.setZero(n, 64);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& g = kGlyphs[static_cast<std::size_t>(digit(rng))];
    const int dx = shift(rng);
    const int dy = shift(rng);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        const int sr = r - dy;
        const int sc = c - dx;
        bool on = sr >= 0 && sr < 8 && sc >= 0 && sc < 8 && g[static_cast<std::size_t>(sr)][sc] == '#';
        if (flip(rng)) on = !on;
        d.features(i, r * 8 + c) = on ? 1.0 : 0.0;
      }
  }
  for (int j = 0; j < 64; ++j) d.feature_names.push_back("p" + std::to_string(j));
  return d;
}

}  // namespace vr
