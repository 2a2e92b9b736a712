#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "acu/manipulation.hpp"

namespace acu {

using Session = std::variant<NeedleSession, MoxaSession, PressSession>;

const std::string& session_id(const Session& s);

// JSON-lines trace: a header object ({"kind": "needle" | "moxa" | "press", ...})
// followed by one sample object per line. Blank lines are ignored.
// Throws Error(InvalidInput) on malformed content, including sessions that
// fail validation.
Session read_trace(std::istream& in);
Session read_trace_file(const std::string& path);

// Fixed formatting: doubles print as the shortest representation that
// round-trips, so identical sessions always produce identical bytes.
void write_trace(std::ostream& out, const Session& session);
std::string trace_to_string(const Session& session);

}  // namespace acu
