#include "lpmsim/records_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "lpmsim/error.hpp"

namespace lpmsim {
namespace {

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
  line += ',';
}

const char* link_name(LinkState s) { return s == LinkState::los ? "LoS" : "NLoS"; }

}  // namespace

void write_records_csv(std::span<const SlotRecord> records, std::ostream& out) {
  out << kRecordsHeader << '\n';
  std::string line;
  for (const auto& r : records) {
    line = std::to_string(r.slot) + ',';
    for (int i = 0; i < 3; ++i) put(line, r.truth.q[i]);
    for (int i = 0; i < 3; ++i) put(line, r.truth.v[i]);
    for (int i = 0; i < 3; ++i) put(line, r.estimate.q[i]);
    for (int i = 0; i < 3; ++i) put(line, r.estimate.v[i]);
    line += link_name(r.link_true);
    line += ',';
    line += link_name(r.link_est);
    line += ',';
    put(line, r.posterior_los);
    line += std::to_string(r.bs_id) + ',';
    put(line, r.beam_gain);
    put(line, r.snr_db);
    put(line, r.rate);
    put(line, r.nis);
    line.back() = '\n';
    out << line;
  }
}

std::vector<SlotRecord> read_records_csv(std::istream& in) {
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line) || line != kRecordsHeader) throw ParseError("records.csv: unexpected header", 0);
  offset += line.size() + 1;
  std::vector<SlotRecord> out;
  while (std::getline(in, line)) {
    const std::size_t row_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 21) throw ParseError("records.csv: expected 21 columns", row_start);
    auto num = [&](std::size_t i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0') throw ParseError("records.csv: bad number", row_start);
      return v;
    };
    auto link = [&](std::size_t i) {
      if (cells[i] == "LoS") return LinkState::los;
      if (cells[i] == "NLoS") return LinkState::nlos;
      throw ParseError("records.csv: bad link state", row_start);
    };
    SlotRecord r;
    r.slot = static_cast<int>(num(0));
    r.truth.q = {num(1), num(2), num(3)};
    r.truth.v = {num(4), num(5), num(6)};
    r.estimate.q = {num(7), num(8), num(9)};
    r.estimate.v = {num(10), num(11), num(12)};
    r.link_true = link(13);
    r.link_est = link(14);
    r.posterior_los = num(15);
    r.bs_id = static_cast<int>(num(16));
    r.beam_gain = num(17);
    r.snr_db = num(18);
    r.rate = num(19);
    r.nis = num(20);
    out.push_back(r);
  }
  return out;
}

void write_trajectory_csv(std::span<const SlotRecord> records, std::ostream& out) {
  out << "slot,qx,qy,qz,vx,vy,vz\n";
  std::string line;
  for (const auto& r : records) {
    line = std::to_string(r.slot) + ',';
    for (int i = 0; i < 3; ++i) put(line, r.truth.q[i]);
    for (int i = 0; i < 3; ++i) put(line, r.truth.v[i]);
    line.back() = '\n';
    out << line;
  }
}

}  // namespace lpmsim
