#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nodal_lab/mesh.hpp"

namespace nodal_lab {

// IMESH v1:
//   IMESH v1
//   V E F
//   V lines "x y [z]"
//   F lines "i j k REGION"
//   E lines "i j length"
// Decimals are written with 17 significant digits so a write/read cycle is exact.

inline void write_imesh(std::ostream& os, const IntrinsicMesh& m) {
    const bool planar = m.chart.kind == Chart::Kind::planar || m.chart.kind == Chart::Kind::periodic;
    os << "IMESH v1\n" << m.vertex_count() << ' ' << m.edge_count() << ' ' << m.triangle_count() << '\n';
    os << std::setprecision(17);
    for (const auto& p : m.points) {
        os << p[0] << ' ' << p[1];
        if (!planar) os << ' ' << p[2];
        os << '\n';
    }
    for (int t = 0; t < m.triangle_count(); ++t) {
        const auto& tr = m.triangles[t];
        os << tr[0] << ' ' << tr[1] << ' ' << tr[2] << ' ' << to_string(m.regions[t]) << '\n';
    }
    for (int e = 0; e < m.edge_count(); ++e)
        os << m.edges[e][0] << ' ' << m.edges[e][1] << ' ' << m.lengths[e] << '\n';
}

/// Reads an IMESH v1 stream. The result carries no chart: its metric is the stored edge lengths.
inline IntrinsicMesh read_imesh(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("IMESH v1", 0) != 0) fail(ErrorKind::io, "missing 'IMESH v1' header");
    long nv = -1, ne = -1, nf = -1;
    if (!std::getline(is, line)) fail(ErrorKind::io, "missing size line");
    std::istringstream(line) >> nv >> ne >> nf;
    if (nv < 0 || ne < 0 || nf < 0) fail(ErrorKind::io, "bad size line '" + line + "'");

    std::vector<Point> pts(nv, Point{0, 0, 0});
    for (long i = 0; i < nv; ++i) {
        if (!std::getline(is, line)) fail(ErrorKind::io, "truncated vertex block");
        std::istringstream ls(line);
        ls >> pts[i][0] >> pts[i][1];
        if (!ls) fail(ErrorKind::io, "bad vertex line '" + line + "'");
        double z;
        if (ls >> z) pts[i][2] = z;
    }
    std::vector<Tri> tris(nf);
    std::vector<Region> regs(nf);
    for (long i = 0; i < nf; ++i) {
        if (!std::getline(is, line)) fail(ErrorKind::io, "truncated face block");
        std::istringstream ls(line);
        std::string tag;
        ls >> tris[i][0] >> tris[i][1] >> tris[i][2] >> tag;
        if (!ls) fail(ErrorKind::io, "bad face line '" + line + "'");
        regs[i] = parse_region(tag);
    }
    std::unordered_map<std::uint64_t, double> len;
    for (long i = 0; i < ne; ++i) {
        if (!std::getline(is, line)) fail(ErrorKind::io, "truncated edge block");
        std::istringstream ls(line);
        int a, b;
        double l;
        ls >> a >> b >> l;
        if (!ls) fail(ErrorKind::io, "bad edge line '" + line + "'");
        len[edge_hash(a, b)] = l;
    }
    auto m = IntrinsicMesh::build(std::move(pts), std::move(tris), std::move(regs), Chart{}, [&](int a, int b) {
        auto it = len.find(edge_hash(a, b));
        if (it == len.end()) fail(ErrorKind::io, "edge length missing for a face edge");
        return it->second;
    });
    if (m.edge_count() != ne) fail(ErrorKind::io, "edge count does not match the faces");
    return m;
}

inline void save_imesh(const std::string& path, const IntrinsicMesh& m) {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::io, "cannot write " + path);
    write_imesh(os, m);
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

inline IntrinsicMesh load_imesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::io, "cannot read " + path);
    return read_imesh(is);
}

}  // namespace nodal_lab
