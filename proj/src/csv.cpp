#include "mems/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mems/config.hpp"
#include "mems/errors.hpp"

namespace mems::csv {

void write_trajectory(std::ostream& out, std::span<const TrajectorySample> samples) {
    out << kTrajectoryHeader << '\n';
    for (const auto& s : samples)
        out << format_double(s.t) << ',' << format_double(s.max_u) << ',' << format_double(s.energy) << ','
            << format_double(s.l2_ut) << ',' << format_double(s.nonlocal_I) << ',' << format_double(s.dt_used)
            << '\n';
}

void write_snapshot(std::ostream& out, const Field& u) {
    const Grid& g = u.grid();
    if (g.layout() == Layout::Plane) {
        out << kSnapshotPlaneHeader << '\n';
        for (std::size_t k = 0; k < u.size(); ++k)
            out << format_double(g.x(k)) << ',' << format_double(g.y(k)) << ',' << format_double(u[k]) << '\n';
    } else {
        out << kSnapshotLineHeader << '\n';
        for (std::size_t k = 0; k < u.size(); ++k) out << format_double(g.x(k)) << ',' << format_double(u[k]) << '\n';
    }
}

void write_sweep(std::ostream& out, std::span<const SweepSeries> series) {
    out << kSweepHeader << '\n';
    for (const auto& s : series)
        for (const auto& p : s.probe)
            out << format_double(s.lambda) << ',' << format_double(p.t) << ',' << format_double(p.value) << '\n';
}

void write_decay(std::ostream& out, std::span<const DecaySample> samples) {
    out << kDecayHeader << '\n';
    for (const auto& s : samples) out << format_double(s.t) << ',' << format_double(s.distance) << '\n';
}

void write_interval(std::ostream& out, double lo, double hi) {
    out << kIntervalHeader << '\n' << format_double(lo) << ',' << format_double(hi) << '\n';
}

void write_history(std::ostream& out, std::span<const LambdaClassification> history) {
    out << kHistoryHeader << '\n';
    for (const auto& c : history)
        out << format_double(c.lambda) << ',' << verdict_name(c.verdict) << ',' << format_double(c.t_terminal) << ','
            << format_double(c.t_max_used) << '\n';
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    writer(out);
    out.flush();
    if (!out) throw Error("failed writing '" + path + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

Table read(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw InvalidArgument("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " columns, got " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw InvalidArgument("csv input is empty");
    return t;
}

}  // namespace mems::csv
