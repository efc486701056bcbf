#include "ab3/prf.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <bit>
#include <cstring>
#include <vector>

#include "ab3/error.hpp"

namespace ab3 {

PrfKey derive_key(std::uint64_t seed, std::uint64_t session_id, std::string_view domain) {
  std::vector<std::uint8_t> msg(16 + domain.size());
  for (int i = 0; i < 8; ++i) {
    msg[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    msg[8 + i] = static_cast<std::uint8_t>(session_id >> (8 * i));
  }
  std::memcpy(msg.data() + 16, domain.data(), domain.size());
  std::array<std::uint8_t, SHA256_DIGEST_LENGTH> digest{};
  SHA256(msg.data(), msg.size(), digest.data());
  PrfKey key{};
  std::memcpy(key.data(), digest.data(), key.size());
  return key;
}

struct Prf::Ctx {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Ctx() { EVP_CIPHER_CTX_free(ctx); }
};

Prf::Prf(const PrfKey& key) : key_(key), ctx_(std::make_unique<Ctx>()) {
  ctx_->ctx = EVP_CIPHER_CTX_new();
  require(ctx_->ctx != nullptr, ErrorKind::kInvalidArgument, "EVP_CIPHER_CTX_new failed");
  require(EVP_EncryptInit_ex(ctx_->ctx, EVP_aes_128_ctr(), nullptr, key_.data(), nullptr) == 1,
          ErrorKind::kInvalidArgument, "AES-128-CTR init failed");
}

Prf::~Prf() = default;
Prf::Prf(Prf&&) noexcept = default;
Prf& Prf::operator=(Prf&&) noexcept = default;

void Prf::fill(std::uint64_t nonce, std::span<u64> out) const {
  if (out.empty()) return;
  std::array<std::uint8_t, 16> iv{};
  // Big-endian nonce in the high half; CTR increments the low half.
  for (int i = 0; i < 8; ++i) iv[i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
  require(EVP_EncryptInit_ex(ctx_->ctx, nullptr, nullptr, nullptr, iv.data()) == 1,
          ErrorKind::kInvalidArgument, "AES-128-CTR reset failed");
  auto* bytes = reinterpret_cast<unsigned char*>(out.data());
  const int len = static_cast<int>(out.size_bytes());
  std::memset(bytes, 0, out.size_bytes());
  int written = 0;
  require(EVP_EncryptUpdate(ctx_->ctx, bytes, &written, bytes, len) == 1 && written == len,
          ErrorKind::kInvalidArgument, "AES-128-CTR encrypt failed");
  // Interpret keystream as little-endian words regardless of host order.
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& w : out) w = __builtin_bswap64(w);
  }
}

}  // namespace ab3
