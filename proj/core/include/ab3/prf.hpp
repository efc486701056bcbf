#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "ab3/ring.hpp"

namespace ab3 {

using PrfKey = std::array<std::uint8_t, 16>;

// Derives a 128-bit key from a seed and a domain label (SHA-256, truncated).
PrfKey derive_key(std::uint64_t seed, std::uint64_t session_id, std::string_view domain);

// Keyed counter-mode generator: AES-128 over the block (nonce || block index).
// Each fill() call takes its own nonce, so distinct nonces never overlap.
class Prf {
 public:
  explicit Prf(const PrfKey& key);
  ~Prf();
  Prf(Prf&&) noexcept;
  Prf& operator=(Prf&&) noexcept;

  void fill(std::uint64_t nonce, std::span<u64> out) const;
  const PrfKey& key() const { return key_; }

 private:
  struct Ctx;
  PrfKey key_;
  std::unique_ptr<Ctx> ctx_;
};

}  // namespace ab3
