#include "qam/hilbert.hpp"

#include <algorithm>
#include <string>

#include "qam/errors.hpp"

namespace qam {

namespace {

void check_spec(const LayoutSpec& spec) {
  if (spec.stable.empty() && spec.dfs.empty())
    fail(ErrorCode::InvalidPatternSet, "layout declares no patterns");
  for (std::size_t i = 0; i < spec.stable.size(); ++i) {
    if (spec.stable[i].dim == 0)
      fail(ErrorCode::LengthMismatch, "stable block " + std::to_string(i) + " has dimension 0");
    if (spec.stable[i].decaying_dim == 0)
      fail(ErrorCode::ZeroBasin, "pattern " + std::to_string(i) + " has an empty decaying space");
  }
  for (std::size_t t = 0; t < spec.dfs.size(); ++t) {
    const auto& d = spec.dfs[t];
    if (d.dim == 0)
      fail(ErrorCode::LengthMismatch, "DFS block " + std::to_string(t) + " has dimension 0");
    if (d.decaying_dims.empty())
      fail(ErrorCode::InvalidPatternSet, "DFS block " + std::to_string(t) + " holds no patterns");
    for (std::size_t l = 0; l < d.decaying_dims.size(); ++l) {
      if (d.decaying_dims[l] == 0)
        fail(ErrorCode::ZeroBasin, "DFS block " + std::to_string(t) + " pattern " +
                                       std::to_string(l) + " has an empty decaying space");
    }
  }
}

std::size_t spec_total(const LayoutSpec& spec) {
  std::size_t total = 0;
  auto add = [&total](std::size_t v) {
    if (v > kMaxDimension || total > kMaxDimension - v)
      fail(ErrorCode::DimensionOverflow,
           "total dimension exceeds " + std::to_string(kMaxDimension));
    total += v;
  };
  for (const auto& s : spec.stable) {
    add(s.dim);
    add(s.decaying_dim);
  }
  for (const auto& d : spec.dfs) {
    add(d.dim);
    for (auto x : d.decaying_dims) add(x);
  }
  return total;
}

std::vector<std::vector<std::size_t>> contiguous_indices(const LayoutSpec& spec) {
  std::vector<std::vector<std::size_t>> out;
  std::size_t next = 0;
  auto take = [&](std::size_t dim) {
    std::vector<std::size_t> idx(dim);
    for (auto& i : idx) i = next++;
    out.push_back(std::move(idx));
  };
  for (const auto& s : spec.stable) take(s.dim);
  for (const auto& d : spec.dfs) take(d.dim);
  for (const auto& s : spec.stable) take(s.decaying_dim);
  for (const auto& d : spec.dfs)
    for (auto x : d.decaying_dims) take(x);
  return out;
}

}  // namespace

SpaceLayout build_layout(const LayoutSpec& spec) {
  check_spec(spec);
  const std::size_t total = spec_total(spec);
  return build_layout(spec, total, contiguous_indices(spec));
}

SpaceLayout build_layout(const LayoutSpec& spec, std::size_t total_dim,
                         const std::vector<std::vector<std::size_t>>& block_indices) {
  check_spec(spec);
  const std::size_t declared = spec_total(spec);
  if (total_dim > kMaxDimension)
    fail(ErrorCode::DimensionOverflow, "total dimension exceeds " + std::to_string(kMaxDimension));
  if (declared > total_dim)
    fail(ErrorCode::DimensionOverflow, "declared blocks exceed the total dimension");

  SpaceLayout layout;
  layout.total_dim_ = total_dim;
  for (std::size_t i = 0; i < spec.stable.size(); ++i)
    layout.stable_.push_back({i, spec.stable[i].dim});
  for (std::size_t t = 0; t < spec.dfs.size(); ++t)
    layout.dfs_.push_back({t, spec.dfs[t].dim, spec.dfs[t].decaying_dims.size()});
  for (std::size_t i = 0; i < spec.stable.size(); ++i)
    layout.decaying_.push_back({spec.stable[i].decaying_dim, {BlockKind::Stable, i, 0}});
  for (std::size_t t = 0; t < spec.dfs.size(); ++t)
    for (std::size_t l = 0; l < spec.dfs[t].decaying_dims.size(); ++l)
      layout.decaying_.push_back({spec.dfs[t].decaying_dims[l], {BlockKind::Dfs, t, l}});

  const std::size_t nblocks = layout.stable_.size() + layout.dfs_.size() + layout.decaying_.size();
  if (block_indices.size() != nblocks)
    fail(ErrorCode::LengthMismatch, "expected index lists for " + std::to_string(nblocks) +
                                        " blocks, got " + std::to_string(block_indices.size()));

  std::vector<bool> used(total_dim, false);
  std::size_t k = 0;
  auto assign = [&](std::size_t dim, std::vector<std::vector<std::size_t>>& dest) {
    const auto& idx = block_indices[k++];
    if (idx.size() != dim)
      fail(ErrorCode::LengthMismatch, "block index list does not match the block dimension");
    for (auto g : idx) {
      if (g >= total_dim) fail(ErrorCode::LengthMismatch, "block index out of range");
      if (used[g]) fail(ErrorCode::InconsistentLayout, "blocks overlap at index " + std::to_string(g));
      used[g] = true;
    }
    dest.push_back(idx);
  };
  for (const auto& b : layout.stable_) assign(b.dim, layout.stable_idx_);
  for (const auto& b : layout.dfs_) assign(b.dim, layout.dfs_idx_);
  for (const auto& b : layout.decaying_) assign(b.dim, layout.decaying_idx_);
  for (std::size_t g = 0; g < total_dim; ++g)
    if (!used[g]) layout.unassigned_.push_back(g);
  return layout;
}

std::size_t SpaceLayout::stable_dim() const {
  std::size_t n = 0;
  for (const auto& b : stable_) n += b.dim;
  for (const auto& b : dfs_) n += b.dim;
  return n;
}

std::size_t SpaceLayout::decaying_dim() const {
  std::size_t n = 0;
  for (const auto& b : decaying_) n += b.dim;
  return n;
}

bool SpaceLayout::contains(BlockId id) const {
  switch (id.kind) {
    case BlockKind::Stable: return id.index < stable_.size();
    case BlockKind::Dfs: return id.index < dfs_.size();
    case BlockKind::Decaying: return id.index < decaying_.size();
  }
  return false;
}

const std::vector<std::size_t>& SpaceLayout::indices(BlockId id) const {
  if (!contains(id)) fail(ErrorCode::UnknownBlock, "block " + std::to_string(id.index));
  switch (id.kind) {
    case BlockKind::Stable: return stable_idx_[id.index];
    case BlockKind::Dfs: return dfs_idx_[id.index];
    case BlockKind::Decaying: break;
  }
  return decaying_idx_[id.index];
}

std::size_t SpaceLayout::block_dim(BlockId id) const { return indices(id).size(); }

std::size_t SpaceLayout::global_index(BlockId id, std::size_t local) const {
  const auto& idx = indices(id);
  if (local >= idx.size()) fail(ErrorCode::LengthMismatch, "local index out of range");
  return idx[local];
}

std::vector<BlockId> SpaceLayout::all_blocks() const {
  std::vector<BlockId> out;
  for (std::size_t i = 0; i < stable_.size(); ++i) out.push_back({BlockKind::Stable, i});
  for (std::size_t i = 0; i < dfs_.size(); ++i) out.push_back({BlockKind::Dfs, i});
  for (std::size_t i = 0; i < decaying_.size(); ++i) out.push_back({BlockKind::Decaying, i});
  return out;
}

std::vector<PatternRef> SpaceLayout::patterns() const {
  std::vector<PatternRef> out;
  for (std::size_t i = 0; i < stable_.size(); ++i) out.push_back({BlockKind::Stable, i, 0});
  for (std::size_t t = 0; t < dfs_.size(); ++t)
    for (std::size_t l = 0; l < dfs_[t].pattern_count; ++l) out.push_back({BlockKind::Dfs, t, l});
  return out;
}

std::vector<BlockId> SpaceLayout::decaying_blocks_of(const PatternRef& pattern) const {
  std::vector<BlockId> out;
  for (std::size_t i = 0; i < decaying_.size(); ++i)
    if (decaying_[i].target == pattern) out.push_back({BlockKind::Decaying, i});
  if (out.empty()) fail(ErrorCode::UnknownBlock, "pattern has no decaying block");
  return out;
}

BlockId SpaceLayout::stable_block_of(const PatternRef& pattern) const {
  const BlockId id{pattern.kind, pattern.block};
  if (pattern.kind == BlockKind::Decaying || !contains(id))
    fail(ErrorCode::UnknownBlock, "pattern reference does not name a stable block");
  return id;
}

std::vector<BlockId> SpaceLayout::basin_blocks(const PatternRef& pattern) const {
  std::vector<BlockId> out{stable_block_of(pattern)};
  for (auto b : decaying_blocks_of(pattern)) out.push_back(b);
  return out;
}

std::vector<std::size_t> SpaceLayout::stable_indices() const {
  std::vector<std::size_t> out;
  for (const auto& v : stable_idx_) out.insert(out.end(), v.begin(), v.end());
  for (const auto& v : dfs_idx_) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SpaceLayout::decaying_indices() const {
  std::vector<bool> stable(total_dim_, false);
  for (auto g : stable_indices()) stable[g] = true;
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < total_dim_; ++g)
    if (!stable[g]) out.push_back(g);
  return out;
}

ComplexVector embed(const ComplexVector& local, BlockId id, const SpaceLayout& layout) {
  const auto& idx = layout.indices(id);
  if (static_cast<std::size_t>(local.size()) != idx.size())
    fail(ErrorCode::LengthMismatch, "local vector length does not match block dimension");
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k]) = local(k);
  return out;
}

ComplexVector extract(const ComplexVector& global, BlockId id, const SpaceLayout& layout) {
  const auto& idx = layout.indices(id);
  if (static_cast<std::size_t>(global.size()) != layout.total_dim())
    fail(ErrorCode::LengthMismatch, "global vector length does not match layout");
  ComplexVector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(k) = global(idx[k]);
  return out;
}

ComplexMatrix embed_operator(const ComplexMatrix& local, BlockId id, const SpaceLayout& layout) {
  const auto& idx = layout.indices(id);
  if (static_cast<std::size_t>(local.rows()) != idx.size() ||
      static_cast<std::size_t>(local.cols()) != idx.size())
    fail(ErrorCode::LengthMismatch, "local operator does not match block dimension");
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < idx.size(); ++j)
    for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i], idx[j]) = local(i, j);
  return out;
}

ComplexMatrix projector_onto_indices(const std::vector<std::size_t>& indices, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (auto g : indices) p(g, g) = 1.0;
  return p;
}

ComplexMatrix projector_onto(const std::vector<BlockId>& blocks, const SpaceLayout& layout) {
  std::vector<std::size_t> idx;
  for (auto b : blocks) {
    const auto& v = layout.indices(b);
    idx.insert(idx.end(), v.begin(), v.end());
  }
  return projector_onto_indices(idx, layout.total_dim());
}

ComplexMatrix projector_onto(BlockId block, const SpaceLayout& layout) {
  return projector_onto(std::vector<BlockId>{block}, layout);
}

}  // namespace qam
