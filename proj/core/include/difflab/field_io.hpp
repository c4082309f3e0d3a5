#pragma once

#include <string>

#include "difflab/grid.hpp"

namespace difflab {

//! Columns r,value and, when the solver carried log form, log_value.
//! Full double precision, one row per node.
void write_radial_csv(const ScalarField& f, const std::string& path);

//! Native-endian binary dump of a Cartesian field. Layout: bytes "DLF1",
//! uint32 ndim, uint64 extents (x first), double spacing, double origin per
//! dimension, then row-major doubles with x fastest.
void write_cartesian_binary(const ScalarField& f, const std::string& path);

//! Inverse of write_cartesian_binary. The mask is not stored in the file;
//! every node of the result is marked inside.
ScalarField read_cartesian_binary(const std::string& path);

}  // namespace difflab
