#include "stop/parse.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace stop {

namespace {

struct RawPoint {
    double x, y;
    int score;
    bool mandatory;
    int line;
};

bool is_blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

double parse_number(const std::string& tok, int line, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ParseError(line, std::string("expected a number for ") + what + ", got '" + tok +
                                   "'");
    }
    return v;
}

int parse_int(const std::string& tok, int line, const char* what) {
    const double v = parse_number(tok, line, what);
    const double rounded = std::floor(v + 0.5);
    if (std::abs(v - rounded) > 1e-9) {
        throw ParseError(line, std::string("expected an integer for ") + what + ", got '" + tok +
                                   "'");
    }
    return static_cast<int>(rounded);
}

std::vector<std::string> tokens_of(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> toks;
    std::string t;
    while (iss >> t) toks.push_back(t);
    return toks;
}

}  // namespace

Instance parse_instance(std::istream& in, FileFormat format) {
    std::string line;
    int line_no = 0;
    int header_seen = 0;
    int n = -1, m = -1;
    double tmax = -1.0;
    std::vector<RawPoint> points;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') continue;
        if (is_blank(line)) continue;
        const std::vector<std::string> toks = tokens_of(line);

        if (header_seen < 3) {
            if (toks.size() != 2) throw ParseError(line_no, "malformed header line");
            if (header_seen == 0) {
                if (toks[0] != "n") throw ParseError(line_no, "expected 'n <count>'");
                n = parse_int(toks[1], line_no, "vertex count");
                if (n < 2) throw ParseError(line_no, "need at least 2 points");
            } else if (header_seen == 1) {
                if (toks[0] != "m") throw ParseError(line_no, "expected 'm <fleet size>'");
                m = parse_int(toks[1], line_no, "fleet size");
                if (m < 1) throw ParseError(line_no, "fleet size must be positive");
            } else {
                if (toks[0] != "tmax") throw ParseError(line_no, "expected 'tmax <limit>'");
                tmax = parse_number(toks[1], line_no, "time limit");
                if (tmax < 0) throw ParseError(line_no, "time limit must be nonnegative");
            }
            ++header_seen;
            continue;
        }

        if (static_cast<int>(points.size()) == n) {
            throw ParseError(line_no, "more than " + std::to_string(n) + " points");
        }
        bool marked = false;
        std::size_t count = toks.size();
        if (count == 4 && toks[3] == "M") {
            if (format == FileFormat::Top) {
                throw ParseError(line_no, "unexpected token 'M' in top format");
            }
            marked = true;
            count = 3;
        }
        if (count != 3) throw ParseError(line_no, "expected 'x y score" +
                                                      std::string(format == FileFormat::Stop
                                                                      ? " [M]'"
                                                                      : "'"));
        RawPoint p;
        p.x = parse_number(toks[0], line_no, "x");
        p.y = parse_number(toks[1], line_no, "y");
        p.score = parse_int(toks[2], line_no, "score");
        if (p.score < 0) throw ParseError(line_no, "score must be nonnegative");
        p.mandatory = marked;
        p.line = line_no;
        points.push_back(p);
    }

    if (header_seen < 3) throw ParseError(line_no, "incomplete header");
    if (static_cast<int>(points.size()) != n) {
        throw ParseError(line_no, "expected " + std::to_string(n) + " points, got " +
                                      std::to_string(points.size()));
    }
    if (points.front().mandatory) {
        throw ParseError(points.front().line, "mandatory marker on origin");
    }
    if (points.back().mandatory) {
        throw ParseError(points.back().line, "mandatory marker on destination");
    }

    Instance inst;
    inst.init(n);
    inst.s = 0;
    inst.t = n - 1;
    inst.fleet_size = m;
    inst.time_limit = tmax;
    inst.has_coords = true;
    for (int i = 0; i < n; ++i) {
        inst.coords[i] = Point{points[i].x, points[i].y};
        if (i == inst.s || i == inst.t) continue;
        if (points[i].mandatory) {
            inst.mandatory[i] = 1;
        } else {
            inst.profitable[i] = 1;
            inst.profit[i] = points[i].score;
        }
    }
    return inst;
}

Instance parse_instance_file(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    Instance inst = parse_instance(in, format);
    // Strip directories and extension for the report name.
    std::size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    inst.name = dot == std::string::npos ? base : base.substr(0, dot);
    return inst;
}

std::map<std::string, double> read_bounds_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bounds file: " + path);
    std::map<std::string, double> bounds;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line) || line[0] == '#') continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(line_no, "expected 'instance_name,best_lb'");
        }
        const std::string name = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        if (line_no == 1 && name == "instance_name") continue;
        bounds[name] = parse_number(value, line_no, "best_lb");
    }
    return bounds;
}

}  // namespace stop
