#ifndef STOP_PARSE_HPP
#define STOP_PARSE_HPP

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "stop/instance.hpp"

namespace stop {

enum class FileFormat { Top, Stop };

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

// Reads the line-oriented Chao-style format:
//   n <int> / m <int> / tmax <float>, then n lines "x y score" (top) or
//   "x y score [M]" (stop). Lines starting with '#' are skipped.
// The first listed point is the origin, the last one the destination.
// Arcs are not populated; call build_graph afterwards.
Instance parse_instance(std::istream& in, FileFormat format);
Instance parse_instance_file(const std::string& path, FileFormat format);

// CSV rows "instance_name,best_lb". A header row is permitted.
std::map<std::string, double> read_bounds_csv(const std::string& path);

}  // namespace stop

#endif
