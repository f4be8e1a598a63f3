#include "dlab/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace dlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace, double chi_radius) {
  auto out = open_out(path);
  const std::size_t p = trace.dim();
  out << "k";
  for (std::size_t i = 0; i < p; ++i) out << ",x_" << i;
  out << ",F,grad_norm,lambda_min,lambda_max,chi\n";

  StoppingTime st(trace, Point(p, 0.0));
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const TraceRecord& r = trace.records[k];
    out << k;
    for (std::size_t i = 0; i < p; ++i) out << ',' << format_double(r.x[i]);
    out << ',' << format_double(r.value) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.lambda_min) << ',' << format_double(r.lambda_max) << ','
        << st.chi(chi_radius, k) << '\n';
  }
}

Trace read_trace_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty file " + path);
  const auto header = split_csv(line);
  if (header.size() < 7 || header[0] != "k") throw Error("csv: not a trace file: " + path);
  const std::size_t p = header.size() - 6;

  Trace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error("csv: ragged row in " + path);
    TraceRecord r;
    r.x.resize(p);
    for (std::size_t i = 0; i < p; ++i) r.x[i] = parse_double(cells[1 + i]);
    r.value = parse_double(cells[1 + p]);
    r.grad_norm = parse_double(cells[2 + p]);
    r.lambda_min = parse_double(cells[3 + p]);
    r.lambda_max = parse_double(cells[4 + p]);
    trace.records.push_back(std::move(r));
  }
  if (!trace.records.empty()) trace.x0 = trace.records.front().x;
  trace.budget = long(trace.records.size()) - 1;
  return trace;
}

void write_flow_csv(const std::string& path, const FlowTrace& trace) {
  auto out = open_out(path);
  const std::size_t p = trace.dim();
  out << "t";
  for (std::size_t i = 0; i < p; ++i) out << ",y_" << i;
  out << ",F,grad_norm,dissipation,winding\n";
  for (const FlowRecord& r : trace.records) {
    out << format_double(r.t);
    for (std::size_t i = 0; i < p; ++i) out << ',' << format_double(r.y[i]);
    out << ',' << format_double(r.value) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.dissipation) << ',' << format_double(r.winding) << '\n';
  }
}

FlowTrace read_flow_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty file " + path);
  const auto header = split_csv(line);
  if (header.size() < 5 || header[0] != "t") throw Error("csv: not a flow file: " + path);
  const std::size_t p = header.size() - 5;

  FlowTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error("csv: ragged row in " + path);
    FlowRecord r;
    r.t = parse_double(cells[0]);
    r.y.resize(p);
    for (std::size_t i = 0; i < p; ++i) r.y[i] = parse_double(cells[1 + i]);
    r.value = parse_double(cells[1 + p]);
    r.grad_norm = parse_double(cells[2 + p]);
    r.dissipation = parse_double(cells[3 + p]);
    r.winding = parse_double(cells[4 + p]);
    trace.records.push_back(std::move(r));
  }
  if (!trace.records.empty()) trace.y0 = trace.records.front().y;
  return trace;
}

std::size_t csv_row_count(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n > 0 ? n - 1 : 0;
}

}  // namespace dlab
