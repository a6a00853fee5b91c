#include "eigenweight/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace eigenweight {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& token) {
  std::string t = token;
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.pop_back();
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("not a number: '" + token + "'");
  return value;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& expected_header,
                                                std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw std::invalid_argument("CSV header '" + line + "' does not match '" + expected_header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != columns)
      throw std::invalid_argument("CSV row '" + line + "' does not have " +
                                  std::to_string(columns) + " columns");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::string emit_weight_csv(const Weight& w) {
  std::string out = "element,value\n";
  for (std::size_t e = 0; e < w.values.size(); ++e)
    out += std::to_string(e) + "," + format_double(w.values[e]) + "\n";
  return out;
}

Weight parse_weight_csv(const std::string& text, double element_measure) {
  const auto rows = parse_csv(text, "element,value", 2);
  Weight w{std::vector<double>(rows.size()), element_measure};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t e = static_cast<std::size_t>(std::stoul(rows[i][0]));
    if (e >= rows.size()) throw std::invalid_argument("weight CSV: element index out of range");
    w.values[e] = parse_double(rows[i][1]);
  }
  return w;
}

std::string emit_step_csv(const StepRearrangement& r) {
  std::string out = "breakpoint,level\n";
  for (std::size_t i = 0; i < r.breakpoints.size(); ++i)
    out += format_double(r.breakpoints[i]) + "," + format_double(r.levels[i]) + "\n";
  return out;
}

StepRearrangement parse_step_csv(const std::string& text) {
  const auto rows = parse_csv(text, "breakpoint,level", 2);
  StepRearrangement r;
  for (const auto& row : rows) {
    r.breakpoints.push_back(parse_double(row[0]));
    r.levels.push_back(parse_double(row[1]));
  }
  return r;
}

std::string emit_trace_csv(const std::vector<TracePoint>& trace) {
  std::string out = "iter,mu1,lambda1,gap\n";
  for (const auto& p : trace) {
    const double lambda = p.mu1 > 0.0 ? 1.0 / p.mu1 : std::numeric_limits<double>::infinity();
    out += std::to_string(p.iteration) + "," + format_double(p.mu1) + "," +
           format_double(lambda) + "," + format_double(p.gap) + "\n";
  }
  return out;
}

std::vector<TracePoint> parse_trace_csv(const std::string& text) {
  const auto rows = parse_csv(text, "iter,mu1,lambda1,gap", 4);
  std::vector<TracePoint> trace;
  for (const auto& row : rows)
    trace.push_back({std::stoi(row[0]), parse_double(row[1]), parse_double(row[3])});
  return trace;
}

std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "k,mu1,lambda1\n";
  for (const auto& r : rows)
    out += std::to_string(r.stripes) + "," + format_double(r.mu1) + "," +
           format_double(r.lambda1) + "\n";
  return out;
}

std::string emit_eigenfunction_csv(const Grid& grid, const Eigen::VectorXd& u_full) {
  std::string out = grid.dimension == 1 ? "node,x,u\n" : "node,x,y,u\n";
  for (int v = 0; v < grid.num_nodes(); ++v) {
    const auto xy = grid.node_coordinates(v);
    out += std::to_string(v) + "," + format_double(xy[0]);
    if (grid.dimension == 2) out += "," + format_double(xy[1]);
    out += "," + format_double(u_full[v]) + "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace eigenweight
