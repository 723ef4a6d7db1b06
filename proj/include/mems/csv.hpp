#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mems/diagnostics.hpp"
#include "mems/domain.hpp"
#include "mems/lambda_search.hpp"
#include "mems/time_integrator.hpp"

namespace mems::csv {

// Header rows, without the trailing newline.
inline constexpr const char* kTrajectoryHeader = "t,max_u,energy,l2_ut,nonlocal_I,dt";
inline constexpr const char* kSnapshotLineHeader = "x,u";
inline constexpr const char* kSnapshotPlaneHeader = "x,y,u";
inline constexpr const char* kSweepHeader = "lambda,t,probe_value";
inline constexpr const char* kDecayHeader = "t,distance";
inline constexpr const char* kIntervalHeader = "lo,hi";
inline constexpr const char* kHistoryHeader = "lambda,verdict,t_terminal,t_max_used";

void write_trajectory(std::ostream& out, std::span<const TrajectorySample> samples);
/// `x,u` on line and radial grids, `x,y,u` on plane grids.
void write_snapshot(std::ostream& out, const Field& u);
void write_sweep(std::ostream& out, std::span<const SweepSeries> series);
void write_decay(std::ostream& out, std::span<const DecaySample> samples);
void write_interval(std::ostream& out, double lo, double hi);
void write_history(std::ostream& out, std::span<const LambdaClassification> history);

/// Writes with `writer` into `path`; throws Error when the file cannot be written.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer);

/// Minimal reader for the files above: header names and numeric rows.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
/// Throws InvalidArgument on an empty input or a ragged row.
Table read(std::istream& in);

}  // namespace mems::csv
