#pragma once

#include "minsurf/errors.hpp"
#include "minsurf/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace minsurf {

/// Extended OFF: "nOFF", then "<n+1> <V> <F> 0", V coordinate rows, F rows "3 i j k".
/// Coordinates are written with 17 significant digits, which round-trips doubles.
inline void write_noff(std::ostream& out, const SurfaceMesh& mesh)
{
    out << "nOFF\n" << mesh.ambient_dim() + 1 << ' ' << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
    char buf[32];
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        for (int c = 0; c <= mesh.ambient_dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", mesh.vertices()(v, c));
            out << (c ? " " : "") << buf;
        }
        out << '\n';
    }
    for (const auto& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

inline void write_noff(const std::string& path, const SurfaceMesh& mesh)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_noff(out, mesh);
}

namespace detail {

/// Next non-empty line with '#' comments removed.
inline bool next_content_line(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

} // namespace detail

inline SurfaceMesh read_noff(std::istream& in, const std::string& name = "mesh")
{
    std::string line;
    if (!detail::next_content_line(in, line)) throw MeshError("empty nOFF input");
    {
        std::istringstream header(line);
        std::string tag;
        header >> tag;
        if (tag != "nOFF") throw MeshError("expected 'nOFF' header, found '" + tag + "'");
    }
    long long dim = 0;
    long long nv = 0;
    long long nf = 0;
    long long ne = 0;
    if (!detail::next_content_line(in, line)) throw MeshError("missing nOFF size line");
    std::istringstream sizes(line);
    if (!(sizes >> dim >> nv >> nf >> ne)) throw MeshError("malformed nOFF size line");
    if (dim < 3 || nv < 3 || nf < 1) throw MeshError("nOFF sizes out of range");

    Eigen::MatrixXd vertices(nv, dim);
    for (long long v = 0; v < nv; ++v) {
        if (!detail::next_content_line(in, line)) throw MeshError("nOFF truncated in vertex block");
        std::istringstream row(line);
        for (long long c = 0; c < dim; ++c) {
            std::string token;
            if (!(row >> token)) throw MeshError("vertex " + std::to_string(v) + " has too few coordinates");
            vertices(v, c) = std::stod(token);
        }
    }
    Faces faces;
    faces.reserve(static_cast<std::size_t>(nf));
    for (long long f = 0; f < nf; ++f) {
        if (!detail::next_content_line(in, line)) throw MeshError("nOFF truncated in face block");
        std::istringstream row(line);
        int count = 0;
        Face face{};
        if (!(row >> count >> face[0] >> face[1] >> face[2]) || count != 3) {
            throw MeshError("face " + std::to_string(f) + " is not a triangle");
        }
        faces.push_back(face);
    }
    return SurfaceMesh(static_cast<int>(dim - 1), std::move(vertices), std::move(faces), std::nullopt, name);
}

inline SurfaceMesh read_noff(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_noff(in, path);
}

} // namespace minsurf
