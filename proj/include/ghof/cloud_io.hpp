#pragma once

#include <iosfwd>
#include <string>

#include "ghof/point_cloud.hpp"

namespace ghof {

// XYZ text: one point per line, "x y z [nx ny nz] [label]", whitespace
// separated. '#' starts a comment on read; the writer never emits comments,
// so write -> read -> write is byte identical.
PointCloud read_xyz(const std::string& path);
void write_xyz(const std::string& path, const PointCloud& cloud);

// Binary little-endian PLY with float32 x,y,z, optional float32 nx,ny,nz,
// optional int32 label. Coordinates are rounded to float32 on write.
PointCloud read_ply(const std::string& path);
void write_ply(const std::string& path, const PointCloud& cloud);

// Dispatch on extension (.xyz or .ply).
PointCloud read_cloud(const std::string& path);
void write_cloud(const std::string& path, const PointCloud& cloud);

}  // namespace ghof
