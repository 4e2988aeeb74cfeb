#include "dsps/population.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dsps/error.hpp"
#include "dsps/mask.hpp"

namespace dsps {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col) {
  const auto where = [&] { return " at line " + std::to_string(line_no) + ", column " + std::to_string(col + 1); };
  if (cell.empty()) throw Error(ErrorCode::NonNumericCell, "empty cell" + where());
  std::string_view body = cell;
  if (body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size())
    throw Error(ErrorCode::NonNumericCell, "'" + std::string(cell) + "' is not a number" + where());
  if (!std::isfinite(v)) throw Error(ErrorCode::NonNumericCell, "non-finite value '" + std::string(cell) + "'" + where());
  return v;
}

}  // namespace

Population::Population(std::vector<std::string> member_ids, std::vector<std::string> feature_names,
                       Eigen::MatrixXd data)
    : member_ids_(std::move(member_ids)), feature_names_(std::move(feature_names)), data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1)
    throw Error(ErrorCode::MalformedCsv, "population needs at least one member and one feature");
  if (static_cast<Eigen::Index>(member_ids_.size()) != data_.rows() ||
      static_cast<Eigen::Index>(feature_names_.size()) != data_.cols())
    throw Error(ErrorCode::MalformedCsv, "ids/names do not match the data shape");
  if (!data_.allFinite()) throw Error(ErrorCode::NonNumericCell, "population contains non-finite values");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : member_ids_)
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateMemberId, "member id '" + id + "' repeats");
  seen.clear();
  for (const auto& name : feature_names_)
    if (!seen.insert(name).second) throw Error(ErrorCode::DuplicateFeatureName, "feature '" + name + "' repeats");
}

Eigen::Index Population::feature_index(std::string_view name) const {
  for (std::size_t j = 0; j < feature_names_.size(); ++j)
    if (feature_names_[j] == name) return static_cast<Eigen::Index>(j);
  throw Error(ErrorCode::UnknownFeature, "no feature named '" + std::string(name) + "'");
}

bool Population::has_feature(std::string_view name) const noexcept {
  for (const auto& f : feature_names_)
    if (f == name) return true;
  return false;
}

Population load_population(std::istream& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<std::string> ids;
  std::vector<double> values;

  while (std::getline(source, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto cells = split(view);
    if (header.empty()) {
      if (cells.size() < 2) throw Error(ErrorCode::MalformedCsv, "header needs an id column and at least one feature");
      for (auto c : cells) header.emplace_back(c);
      continue;
    }
    if (cells.size() != header.size())
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                               " cells, header has " + std::to_string(header.size()));
    if (cells[0].empty()) throw Error(ErrorCode::MalformedCsv, "empty member id at line " + std::to_string(line_no));
    ids.emplace_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_cell(cells[c], line_no, c));
  }
  if (header.empty()) throw Error(ErrorCode::MalformedCsv, "empty file");
  if (ids.empty()) throw Error(ErrorCode::MalformedCsv, "no member rows");

  const auto n_x = static_cast<Eigen::Index>(header.size() - 1);
  const auto n_p = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd data =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n_p, n_x);
  return Population(std::move(ids), std::vector<std::string>(header.begin() + 1, header.end()), std::move(data));
}

Population load_population_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return load_population(in);
}

void write_population(std::ostream& out, const Population& pop) {
  out << "id";
  for (const auto& f : pop.feature_names()) out << ',' << f;
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < pop.size(); ++i) {
    out << pop.member_ids()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < pop.n_features(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", pop.data()(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

Eigen::VectorXd feature_column(const Population& pop, std::string_view name) {
  return pop.column(pop.feature_index(name));
}

Population subset_rows(const Population& pop, std::span<const Eigen::Index> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptySelection, "no rows selected");
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), pop.n_features());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Eigen::Index i = rows[k];
    if (i < 0 || i >= pop.size()) throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(i) + " out of range");
    ids.push_back(pop.member_ids()[static_cast<std::size_t>(i)]);
    data.row(static_cast<Eigen::Index>(k)) = pop.data().row(i);
  }
  return Population(std::move(ids), pop.feature_names(), std::move(data));
}

Population subset(const Population& pop, const SelectionMask& mask) {
  if (mask.size() != pop.size())
    throw Error(ErrorCode::LengthMismatch, "mask length " + std::to_string(mask.size()) + " differs from population size " +
                                               std::to_string(pop.size()));
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    if (mask.bits[static_cast<std::size_t>(i)]) rows.push_back(i);
  return subset_rows(pop, rows);
}

}  // namespace dsps
