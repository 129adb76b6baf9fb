#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace curbside {

enum class AgentKind { Pedestrian, Car };

enum class AgentState { Walking, WaitingAtCrosswalk, Arrived, Driving };

std::string to_string(AgentState s);
std::string to_string(AgentKind k);

struct TraceRow {
    long tick = 0;
    int id = 0;
    AgentKind kind = AgentKind::Pedestrian;
    double x_m = 0.0;
    double y_m = 0.0;
    AgentState state = AgentState::Walking;
    std::optional<int> lane; // cars only
};

// Simulation output ordered by (tick, id). Positions are BEV meters and are
// serialized with fixed 6-decimal formatting, so identical runs produce
// byte-identical files.
struct Trace {
    double dt = 0.1;
    std::vector<TraceRow> rows;

    long last_tick() const { return rows.empty() ? -1 : rows.back().tick; }
};

void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

} // namespace curbside
