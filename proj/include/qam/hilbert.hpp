#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "qam/types.hpp"

namespace qam {

inline constexpr std::size_t kMaxDimension = 4096;

enum class BlockKind { Stable, Dfs, Decaying };

struct BlockId {
  BlockKind kind;
  std::size_t index;
  auto operator<=>(const BlockId&) const = default;
};

// Identifies a pattern: an irreducible block, or pattern `pattern` of a DFS block.
struct PatternRef {
  BlockKind kind;  // Stable or Dfs
  std::size_t block;
  std::size_t pattern = 0;
  auto operator<=>(const PatternRef&) const = default;
};

struct IrreducibleBlock {
  std::size_t label;
  std::size_t dim;
};

struct DfsBlock {
  std::size_t label;
  std::size_t dim;
  std::size_t pattern_count;
};

struct DecayingBlock {
  std::size_t dim;
  PatternRef target;
};

struct StableDecl {
  std::size_t dim = 1;
  std::size_t decaying_dim = 1;
};

struct DfsDecl {
  std::size_t dim = 1;
  std::vector<std::size_t> decaying_dims;  // one per pattern
};

struct LayoutSpec {
  std::vector<StableDecl> stable;
  std::vector<DfsDecl> dfs;
};

class SpaceLayout {
 public:
  std::size_t total_dim() const { return total_dim_; }
  std::size_t stable_dim() const;
  std::size_t decaying_dim() const;

  const std::vector<IrreducibleBlock>& stable_blocks() const { return stable_; }
  const std::vector<DfsBlock>& dfs_blocks() const { return dfs_; }
  const std::vector<DecayingBlock>& decaying_blocks() const { return decaying_; }
  const std::vector<std::size_t>& unassigned() const { return unassigned_; }

  bool contains(BlockId id) const;
  std::size_t block_dim(BlockId id) const;
  const std::vector<std::size_t>& indices(BlockId id) const;
  std::size_t global_index(BlockId id, std::size_t local) const;

  // Blocks in canonical order: stable, dfs, decaying.
  std::vector<BlockId> all_blocks() const;
  std::vector<PatternRef> patterns() const;
  std::vector<BlockId> decaying_blocks_of(const PatternRef& pattern) const;
  BlockId stable_block_of(const PatternRef& pattern) const;
  std::vector<BlockId> basin_blocks(const PatternRef& pattern) const;

  // Sorted global indices of all stable and DFS blocks, and of everything else.
  std::vector<std::size_t> stable_indices() const;
  std::vector<std::size_t> decaying_indices() const;

  friend SpaceLayout build_layout(const LayoutSpec& spec);
  friend SpaceLayout build_layout(const LayoutSpec& spec, std::size_t total_dim,
                                  const std::vector<std::vector<std::size_t>>& block_indices);

 private:
  std::size_t total_dim_ = 0;
  std::vector<IrreducibleBlock> stable_;
  std::vector<DfsBlock> dfs_;
  std::vector<DecayingBlock> decaying_;
  std::vector<std::vector<std::size_t>> stable_idx_;
  std::vector<std::vector<std::size_t>> dfs_idx_;
  std::vector<std::vector<std::size_t>> decaying_idx_;
  std::vector<std::size_t> unassigned_;
};

// Contiguous layout: stable blocks, then DFS blocks, then decaying blocks
// grouped by target in the same order.
SpaceLayout build_layout(const LayoutSpec& spec);

// Layout with explicit global indices per block (canonical block order).
// Indices not covered by any block are recorded as unassigned.
SpaceLayout build_layout(const LayoutSpec& spec, std::size_t total_dim,
                         const std::vector<std::vector<std::size_t>>& block_indices);

ComplexVector embed(const ComplexVector& local, BlockId id, const SpaceLayout& layout);
ComplexVector extract(const ComplexVector& global, BlockId id, const SpaceLayout& layout);
ComplexMatrix embed_operator(const ComplexMatrix& local, BlockId id, const SpaceLayout& layout);

ComplexMatrix projector_onto(const std::vector<BlockId>& blocks, const SpaceLayout& layout);
ComplexMatrix projector_onto(BlockId block, const SpaceLayout& layout);
ComplexMatrix projector_onto_indices(const std::vector<std::size_t>& indices, std::size_t dim);

}  // namespace qam
