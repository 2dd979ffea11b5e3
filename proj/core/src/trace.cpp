#include "agdlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace agdlab {

void Trace::push(UpdateEvent ev) {
  if (ev.coord < 0 || ev.coord >= dim()) throw std::invalid_argument("trace: coordinate out of range");
  if (!events_.empty() && !(ev.time > events_.back().time))
    throw std::invalid_argument("trace: events must be strictly time ordered");
  if (by_coord_.size() != initial_point.size()) by_coord_.assign(initial_point.size(), {});
  by_coord_[static_cast<std::size_t>(ev.coord)].push_back(static_cast<std::int32_t>(events_.size()));
  events_.push_back(std::move(ev));
}

const std::vector<std::int32_t>& Trace::coord_events(int k) const {
  static const std::vector<std::int32_t> empty;
  if (by_coord_.empty()) return empty;
  return by_coord_[static_cast<std::size_t>(k)];
}

namespace {

// Index of the last event of coordinate k satisfying cmp(time), or -1.
template <typename Pred>
std::int32_t last_event_where(const Trace& tr, int k, Pred cmp) {
  const auto& idx = tr.coord_events(k);
  std::int32_t lo = 0, hi = static_cast<std::int32_t>(idx.size()) - 1, ans = -1;
  while (lo <= hi) {
    const std::int32_t mid = lo + (hi - lo) / 2;
    if (cmp(tr.events()[static_cast<std::size_t>(idx[static_cast<std::size_t>(mid)])].time)) {
      ans = idx[static_cast<std::size_t>(mid)];
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return ans;
}

}  // namespace

double Trace::value_at(int k, double t) const {
  const std::int32_t e = last_event_where(*this, k, [t](double s) { return s <= t; });
  return e < 0 ? initial_point[static_cast<std::size_t>(k)] : events_[static_cast<std::size_t>(e)].value_after;
}

double Trace::value_before_time(int k, double t) const {
  const std::int32_t e = last_event_where(*this, k, [t](double s) { return s < t; });
  return e < 0 ? initial_point[static_cast<std::size_t>(k)] : events_[static_cast<std::size_t>(e)].value_after;
}

std::pair<double, double> Trace::attained_range(int k, double t1, double t2) const {
  if (!(t1 <= t2)) throw std::invalid_argument("attained_range: t1 > t2");
  double lo = value_before_time(k, t1);
  double hi = lo;
  const auto& idx = coord_events(k);
  // First event with time >= t1.
  auto it = std::lower_bound(idx.begin(), idx.end(), t1, [this](std::int32_t e, double t) {
    return events_[static_cast<std::size_t>(e)].time < t;
  });
  for (; it != idx.end(); ++it) {
    const UpdateEvent& ev = events_[static_cast<std::size_t>(*it)];
    if (ev.time > t2) break;
    lo = std::min(lo, ev.value_after);
    hi = std::max(hi, ev.value_after);
  }
  return {lo, hi};
}

std::int32_t Trace::next_event_after(int k, double t) const {
  const auto& idx = coord_events(k);
  auto it = std::upper_bound(idx.begin(), idx.end(), t, [this](double tt, std::int32_t e) {
    return tt < events_[static_cast<std::size_t>(e)].time;
  });
  return it == idx.end() ? -1 : *it;
}

Point Trace::final_point() const {
  Point p = initial_point;
  for (const auto& ev : events_) p[static_cast<std::size_t>(ev.coord)] = ev.value_after;
  return p;
}

Point Trace::point_at(double t) const {
  Point p = initial_point;
  for (const auto& ev : events_) {
    if (ev.time > t) break;
    p[static_cast<std::size_t>(ev.coord)] = ev.value_after;
  }
  return p;
}

CoordBox window_box(const Trace& trace, int j, double t1, double t2, double s_j) {
  if (!(t1 <= t2)) throw std::invalid_argument("window_box: t1 > t2");
  if (t2 > trace.horizon) throw std::out_of_range("window_box: t2 beyond recorded trace");
  const int n = trace.dim();
  CoordBox box;
  box.lo.resize(static_cast<std::size_t>(n));
  box.hi.resize(static_cast<std::size_t>(n));
  box.pinned_coord = j;
  box.pinned_value = s_j;
  for (int k = 0; k < n; ++k) {
    if (k == j) {
      box.lo[static_cast<std::size_t>(k)] = s_j;
      box.hi[static_cast<std::size_t>(k)] = s_j;
      continue;
    }
    auto [lo, hi] = trace.attained_range(k, t1, t2);
    box.lo[static_cast<std::size_t>(k)] = lo;
    box.hi[static_cast<std::size_t>(k)] = hi;
  }
  return box;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "# agdlab trace v1\n";
  out << "# n=" << trace.dim() << " horizon=" << format_double(trace.horizon) << " seed=" << trace.seed
      << " market=" << (trace.market_columns ? 1 : 0) << "\n";
  out << "# problem=" << trace.problem_tag << "\n";
  out << "# schedule=" << trace.schedule_tag << " staleness=" << trace.staleness_tag << "\n";
  out << "# p0=";
  for (std::size_t k = 0; k < trace.initial_point.size(); ++k) {
    if (k) out << " ";
    out << format_double(trace.initial_point[k]);
  }
  out << "\n";
  out << "seq,time,coord,tau,g_tilde,g_fresh,gamma,delta_p,value_before,value_after,phi_after";
  if (trace.market_columns) out << ",z_tilde,z_fresh,v";
  out << "\n";
  for (const auto& ev : trace.events()) {
    out << ev.seq << "," << format_double(ev.time) << "," << ev.coord << "," << format_double(ev.tau) << ","
        << format_double(ev.g_tilde) << "," << format_double(ev.g_fresh) << "," << format_double(ev.gamma)
        << "," << format_double(ev.delta_p) << "," << format_double(ev.value_before) << ","
        << format_double(ev.value_after) << "," << format_double(ev.phi_after);
    if (trace.market_columns)
      out << "," << format_double(ev.z_tilde) << "," << format_double(ev.z_fresh) << ","
          << format_double(ev.warehouse);
    out << "\n";
  }
}

void write_trace_csv_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  write_trace_csv(out, trace);
}

namespace {

[[noreturn]] void parse_fail(const std::string& context, const std::string& what) {
  throw std::runtime_error("trace csv (" + context + "): " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Trace read_trace_csv(std::istream& in, const std::string& context) {
  Trace trace;
  std::string line;
  bool have_header = false;
  bool market = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "horizon") trace.horizon = std::stod(val);
        else if (key == "seed") trace.seed = std::stoull(val);
        else if (key == "market") market = val == "1";
        else if (key == "problem") trace.problem_tag = val;
        else if (key == "schedule") trace.schedule_tag = val;
        else if (key == "staleness") trace.staleness_tag = val;
        else if (key == "p0") {
          trace.initial_point.clear();
          trace.initial_point.push_back(std::stod(val));
          double x = 0.0;
          while (meta >> x) trace.initial_point.push_back(x);
        }
      }
      continue;
    }
    if (!have_header) {
      if (line.rfind("seq,time,coord,tau,", 0) != 0) parse_fail(context, "missing header row");
      have_header = true;
      trace.market_columns = market;
      if (trace.initial_point.empty()) parse_fail(context, "missing p0 metadata");
      continue;
    }
    const auto f = split_csv(line);
    const std::size_t expect = market ? 14 : 11;
    if (f.size() != expect) parse_fail(context, "wrong column count in row: " + line);
    UpdateEvent ev;
    std::size_t c = 0;
    ev.seq = std::stoll(f[c++]);
    ev.time = std::stod(f[c++]);
    ev.coord = std::stoi(f[c++]);
    ev.tau = std::stod(f[c++]);
    ev.g_tilde = std::stod(f[c++]);
    ev.g_fresh = std::stod(f[c++]);
    ev.gamma = std::stod(f[c++]);
    ev.delta_p = std::stod(f[c++]);
    ev.value_before = std::stod(f[c++]);
    ev.value_after = std::stod(f[c++]);
    ev.phi_after = std::stod(f[c++]);
    if (market) {
      ev.z_tilde = std::stod(f[c++]);
      ev.z_fresh = std::stod(f[c++]);
      ev.warehouse = std::stod(f[c++]);
    }
    trace.push(std::move(ev));
  }
  if (!have_header) parse_fail(context, "empty trace");
  return trace;
}

Trace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace_csv(in, path);
}

}  // namespace agdlab
