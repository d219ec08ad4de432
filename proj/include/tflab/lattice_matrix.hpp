#pragma once

#include "tflab/lattice.hpp"
#include "tflab/types.hpp"

namespace tflab
{
    /// Dense matrix indexed by Lambda_R x Lambda_R in the lattice enumeration;
    /// entry (mu, lambda) sits at row index(mu), column index(lambda).
    struct LatticeMatrix
    {
        TruncatedLattice lattice;
        CMatrix entries;

        LatticeMatrix(TruncatedLattice lat, CMatrix a) : lattice(std::move(lat)), entries(std::move(a))
        {
            if (entries.rows() != lattice.size() || entries.cols() != lattice.size())
                throw ShapeError("matrix does not match the lattice");
        }

        static LatticeMatrix zero(const TruncatedLattice& lat)
        {
            return LatticeMatrix(lat, CMatrix::Zero(lat.size(), lat.size()));
        }
        static LatticeMatrix identity(const TruncatedLattice& lat)
        {
            return LatticeMatrix(lat, CMatrix::Identity(lat.size(), lat.size()));
        }

        Eigen::Index size() const noexcept { return entries.rows(); }
    };
}  // namespace tflab
