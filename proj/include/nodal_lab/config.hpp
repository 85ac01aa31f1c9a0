#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nodal_lab/builders.hpp"
#include "nodal_lab/mesh_io.hpp"
#include "nodal_lab/polygon.hpp"

namespace nodal_lab {

/// Flat key = value configuration. Lines starting with '#' are comments.
/// Every lookup is recorded so unknown keys can be reported.
class Config {
public:
    static Config parse(std::istream& is) {
        Config c;
        std::string line;
        int number = 0;
        while (std::getline(is, line)) {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string body = trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                fail(ErrorKind::invalid_input, "config line " + std::to_string(number) + ": expected key = value");
            const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
            if (key.empty()) fail(ErrorKind::invalid_input, "config line " + std::to_string(number) + ": empty key");
            if (c.values_.count(key))
                fail(ErrorKind::invalid_input, "config line " + std::to_string(number) + ": duplicate key " + key);
            c.values_[key] = value;
        }
        return c;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) fail(ErrorKind::invalid_input, "cannot open config file " + path);
        return parse(in);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) fail(ErrorKind::invalid_input, "config: missing key " + key);
        return it->second;
    }

    double get(const std::string& key, double fallback) const {
        return has(key) ? to_double(key, require_string(key)) : (used_.insert(key), fallback);
    }

    int get(const std::string& key, int fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        const std::string v = require_string(key);
        int out = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size())
            fail(ErrorKind::invalid_input, "config: " + key + " must be an integer, got '" + v + "'");
        return out;
    }

    bool get(const std::string& key, bool fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        const std::string v = require_string(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail(ErrorKind::invalid_input, "config: " + key + " must be true or false, got '" + v + "'");
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::vector<double> out;
        for (const auto& item : split(require_string(key), ',')) out.push_back(to_double(key, trim(item)));
        return out;
    }

    /// Keys present in the file but never read.
    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : s) {
            if (ch == sep) {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    }

    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_input, "config: " + key + " must be a number, got '" + v + "'");
        }
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

/// Geometry strings:
///   sphere:SUB                      icosphere with SUB subdivisions
///   ellipsoid:SUB:A,B,C             icosphere stretched to semi-axes A, B, C
///   torus:H                         flat torus of side 2 pi, mesh size H
///   genus:G:H                       closed surface of genus G
///   rectangle:W,H0:H                [0,W] x [0,H0]
///   disk:R:H                        disk of radius R
///   polygon:x0,y0,x1,y1,...:H       simple polygon
///   file:PATH                       IMESH v1 file
inline IntrinsicMesh parse_geometry(const std::string& spec) {
    const auto parts = Config::split(spec, ':');
    const std::string& kind = parts[0];
    auto num = [&](std::size_t i) {
        if (i >= parts.size()) fail(ErrorKind::invalid_input, "geometry '" + spec + "': missing field");
        return Config::to_double("geometry", parts[i]);
    };
    auto nums = [&](std::size_t i) {
        if (i >= parts.size()) fail(ErrorKind::invalid_input, "geometry '" + spec + "': missing field");
        std::vector<double> out;
        for (const auto& s : Config::split(parts[i], ',')) out.push_back(Config::to_double("geometry", s));
        return out;
    };
    auto whole = [&](double x) {
        if (x != std::floor(x) || x < 0) fail(ErrorKind::invalid_input, "geometry '" + spec + "': expected a count");
        return static_cast<int>(x);
    };
    if (kind == "sphere") return build_sphere(whole(num(1)));
    if (kind == "ellipsoid") {
        const auto ax = nums(2);
        if (ax.size() != 3) fail(ErrorKind::invalid_input, "geometry '" + spec + "': need three axes");
        return build_ellipsoid(whole(num(1)), {ax[0], ax[1], ax[2]});
    }
    if (kind == "torus") return build_flat_torus(2.0 * std::numbers::pi, num(1));
    if (kind == "genus") return build_genus_surface(whole(num(1)), num(2));
    if (kind == "rectangle") {
        const auto wh = nums(1);
        if (wh.size() != 2) fail(ErrorKind::invalid_input, "geometry '" + spec + "': need width,height");
        return build_rectangle(wh[0], wh[1], num(2));
    }
    if (kind == "disk") return build_disk(num(1), num(2));
    if (kind == "polygon") {
        const auto xy = nums(1);
        if (xy.size() < 6 || xy.size() % 2) fail(ErrorKind::invalid_input, "geometry '" + spec + "': bad vertex list");
        std::vector<Point2> poly;
        for (std::size_t i = 0; i < xy.size(); i += 2) poly.push_back({xy[i], xy[i + 1]});
        return build_polygon(poly, num(2));
    }
    if (kind == "file") {
        if (parts.size() < 2) fail(ErrorKind::invalid_input, "geometry '" + spec + "': missing path");
        std::string path = parts[1];
        for (std::size_t i = 2; i < parts.size(); ++i) path += ":" + parts[i];
        return load_imesh(path);
    }
    fail(ErrorKind::invalid_input, "unknown geometry kind '" + kind + "'");
}

}  // namespace nodal_lab
