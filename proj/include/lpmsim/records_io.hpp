#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "lpmsim/sim.hpp"

namespace lpmsim {

inline constexpr std::string_view kRecordsHeader =
    "slot,qx,qy,qz,vx,vy,vz,qhx,qhy,qhz,vhx,vhy,vhz,link_true,link_est,posterior_los,bs_id,beam_gain,snr_db,rate,nis";

/// Writes the header and one row per slot; doubles use 17 significant digits.
void write_records_csv(std::span<const SlotRecord> records, std::ostream& out);

/// Reads records.csv back. Diagnostic-only fields are left at their defaults.
std::vector<SlotRecord> read_records_csv(std::istream& in);

/// Writes `slot,qx,qy,qz,vx,vy,vz` for the truth trajectory.
void write_trajectory_csv(std::span<const SlotRecord> records, std::ostream& out);

}  // namespace lpmsim
