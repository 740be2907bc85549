#include "css/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace css {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_double17(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, std::size_t line, const std::string& column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ParseError(line, column, "cannot parse \"" + text + "\" as a number");
  }
  return value;
}

int parse_label(const std::string& text, std::size_t line) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw ParseError(line, "label", "label must be 0 or 1, got \"" + text + "\"");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::vector<ScoredExample> read_scored_rows(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw MissingHeader(path + " is empty");
  const auto header = split_line(line);
  const bool grouped = header.size() == 3 && header[2] == "group";
  if (!(header.size() == 2 || grouped) || header[0] != "score" || header[1] != "label") {
    throw MissingHeader(path + ": expected header score,label[,group]");
  }

  std::vector<ScoredExample> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, header[std::min(fields.size(), header.size()) - 1],
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    ScoredExample ex;
    ex.score = parse_double(fields[0], line_no, "score");
    ex.label = parse_label(fields[1], line_no);
    if (grouped) ex.group = fields[2];
    rows.push_back(std::move(ex));
  }
  return rows;
}

CalibrationSet read_scored_csv(const std::string& path) {
  return make_calibration_set(read_scored_rows(path));
}

Pool read_pool_csv(const std::string& path) {
  const auto rows = read_scored_rows(path);
  Pool pool;
  bool grouped = false;
  for (const auto& r : rows) grouped = grouped || r.has_group();
  pool.scores.reserve(rows.size());
  pool.labels.reserve(rows.size());
  for (const auto& r : rows) {
    pool.scores.push_back(r.score);
    pool.labels.push_back(r.label);
    if (grouped) pool.groups.push_back(r.group);
  }
  pool.validate();
  return pool;
}

void write_scored_csv(const std::string& path, const std::vector<ScoredExample>& rows) {
  auto out = open_output(path);
  bool grouped = false;
  for (const auto& r : rows) grouped = grouped || r.has_group();
  out << (grouped ? "score,label,group\n" : "score,label\n");
  for (const auto& r : rows) {
    out << format_double17(r.score) << ',' << r.label;
    if (grouped) out << ',' << r.group;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<FeatureRow> read_feature_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw MissingHeader(path + " is empty");
  const auto header = split_line(line);
  if (header.empty() || header[0] != "label" || header.size() < 2) {
    throw MissingHeader(path + ": expected header label,f1,...[,group]");
  }
  const bool grouped = header.back() == "group";
  const std::size_t dim = header.size() - 1 - (grouped ? 1 : 0);
  if (dim == 0) throw MissingHeader(path + ": no feature columns");

  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, header[std::min(fields.size(), header.size()) - 1],
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    FeatureRow row;
    row.label = parse_label(fields[0], line_no);
    row.features.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      row.features.push_back(parse_double(fields[1 + j], line_no, header[1 + j]));
    }
    if (grouped) row.group = fields.back();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_feature_csv(const std::string& path, const std::vector<FeatureRow>& rows) {
  if (rows.empty()) throw EmptyInput("no feature rows to write");
  auto out = open_output(path);
  bool grouped = false;
  for (const auto& r : rows) grouped = grouped || !r.group.empty();
  const std::size_t dim = rows.front().features.size();
  out << "label";
  for (std::size_t j = 1; j <= dim; ++j) out << ",f" << j;
  if (grouped) out << ",group";
  out << '\n';
  for (const auto& r : rows) {
    out << r.label;
    for (double f : r.features) out << ',' << format_double17(f);
    if (grouped) out << ',' << r.group;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

LogisticModel read_model(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != "logistic v1") {
    throw MissingHeader(path + ": expected `logistic v1` on line 1");
  }
  LogisticModel model;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(2, "intercept", "missing intercept line");
  ++line_no;
  model.intercept = parse_double(line, line_no, "intercept");

  std::vector<std::string> rest;
  while (std::getline(in, line)) {
    if (!line.empty()) rest.push_back(line);
  }
  if (rest.size() % 2 != 0 || rest.empty()) {
    throw ParseError(line_no, "weights", "expected D weight lines then D mean/scale lines");
  }
  const std::size_t dim = rest.size() / 2;
  for (std::size_t j = 0; j < dim; ++j) {
    model.weights.push_back(parse_double(rest[j], line_no + 1 + j, "weight"));
  }
  for (std::size_t j = 0; j < dim; ++j) {
    std::istringstream pair(rest[dim + j]);
    std::string mean_text, scale_text;
    if (!(pair >> mean_text >> scale_text)) {
      throw ParseError(line_no + 1 + dim + j, "standardization", "expected `mean scale`");
    }
    model.means.push_back(parse_double(mean_text, line_no + 1 + dim + j, "mean"));
    model.scales.push_back(parse_double(scale_text, line_no + 1 + dim + j, "scale"));
  }
  return model;
}

void write_model(const std::string& path, const LogisticModel& model) {
  auto out = open_output(path);
  out << "logistic v1\n" << format_double17(model.intercept) << '\n';
  for (double w : model.weights) out << format_double17(w) << '\n';
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    out << format_double17(model.means[j]) << ' ' << format_double17(model.scales[j]) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace css
