#include "cuediary/hashing.hpp"

#include "cuediary/error.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>

namespace cuediary {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest.data());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (unsigned char b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0x0F]);
    }
    return out;
}

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                        reinterpret_cast<const unsigned char*>(bytes.data()),
                                        static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

std::string base64_decode(std::string_view encoded) {
    if (encoded.size() % 4 != 0) {
        throw Error(ErrorCode::InvalidArgument, "base64 input length is not a multiple of 4");
    }
    std::string out(3 * encoded.size() / 4, '\0');
    const int written = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                        reinterpret_cast<const unsigned char*>(encoded.data()),
                                        static_cast<int>(encoded.size()));
    if (written < 0) throw Error(ErrorCode::InvalidArgument, "malformed base64 input");
    // EVP_DecodeBlock keeps the bytes produced by '=' padding; drop them.
    std::size_t len = static_cast<std::size_t>(written);
    if (!encoded.empty() && encoded.back() == '=') --len;
    if (encoded.size() >= 2 && encoded[encoded.size() - 2] == '=') --len;
    out.resize(len);
    return out;
}

}  // namespace cuediary
