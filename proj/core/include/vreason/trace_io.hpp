#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vreason/trace.hpp"

namespace vreason {

// One trace per line, self-describing JSON field names. The encoding is
// deterministic: equal traces always produce identical bytes.
std::string trace_to_line(const RunTrace& trace);
RunTrace trace_from_line(const std::string& line);

// Reads every non-blank line. Throws RecordFormatError carrying the
// one-based line number on a malformed line, IoError if unreadable.
std::vector<RunTrace> read_trace_file(const std::filesystem::path& path);

void write_trace_file(const std::filesystem::path& path, const std::vector<RunTrace>& traces);
void append_trace_line(std::ostream& out, const RunTrace& trace);

}  // namespace vreason
