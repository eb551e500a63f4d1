#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

namespace epcdisc {

namespace detail {

inline std::vector<unsigned char> hex_decode(std::string_view hex)
{
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2)
        throw std::invalid_argument("hex_decode: odd length");
    std::vector<unsigned char> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("hex_decode: not hex");
        out.push_back(static_cast<unsigned char>(hi << 4 | lo));
    }
    return out;
}

inline std::string hex_encode(const unsigned char* data, std::size_t n)
{
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(kHex[data[i] >> 4]);
        out.push_back(kHex[data[i] & 0xf]);
    }
    return out;
}

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

} // namespace detail

/// Ed25519 keypair with raw 32-byte keys carried as lowercase hex.
struct SigningKey {
    std::string secret_hex; // 64 hex chars
    std::string public_hex; // 64 hex chars

    static SigningKey generate()
    {
        EVP_PKEY* raw = nullptr;
        EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr);
        if (!ctx || EVP_PKEY_keygen_init(ctx) <= 0 ||
            EVP_PKEY_keygen(ctx, &raw) <= 0) {
            EVP_PKEY_CTX_free(ctx);
            throw std::runtime_error("ed25519 keygen failed");
        }
        EVP_PKEY_CTX_free(ctx);
        detail::PkeyPtr key(raw);

        unsigned char sec[32], pub[32];
        std::size_t sec_len = sizeof sec, pub_len = sizeof pub;
        if (EVP_PKEY_get_raw_private_key(key.get(), sec, &sec_len) <= 0 ||
            EVP_PKEY_get_raw_public_key(key.get(), pub, &pub_len) <= 0)
            throw std::runtime_error("ed25519 key export failed");
        return {detail::hex_encode(sec, sec_len), detail::hex_encode(pub, pub_len)};
    }
};

inline std::string sign_message(std::string_view message, const std::string& secret_hex)
{
    auto raw = detail::hex_decode(secret_hex);
    detail::PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                                     raw.data(), raw.size()));
    if (!key)
        throw std::invalid_argument("sign: bad secret key");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    unsigned char sig[64];
    std::size_t sig_len = sizeof sig;
    int ok = ctx && EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, key.get()) > 0 &&
             EVP_DigestSign(ctx, sig, &sig_len,
                            reinterpret_cast<const unsigned char*>(message.data()),
                            message.size()) > 0;
    EVP_MD_CTX_free(ctx);
    if (!ok)
        throw std::runtime_error("sign: signing failed");
    return detail::hex_encode(sig, sig_len);
}

/// Never throws on malformed input: any parse failure is a verification failure.
inline bool verify_signature(std::string_view message, const std::string& signature_hex,
                             const std::string& public_hex) noexcept
{
    try {
        auto sig = detail::hex_decode(signature_hex);
        auto pub = detail::hex_decode(public_hex);
        detail::PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                                        pub.data(), pub.size()));
        if (!key)
            return false;
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        int ok = ctx &&
                 EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key.get()) > 0 &&
                 EVP_DigestVerify(ctx, sig.data(), sig.size(),
                                  reinterpret_cast<const unsigned char*>(message.data()),
                                  message.size()) > 0;
        EVP_MD_CTX_free(ctx);
        return ok > 0;
    } catch (...) {
        return false;
    }
}

} // namespace epcdisc
