#ifndef EDUML_DIGEST_H_
#define EDUML_DIGEST_H_

#include <string>
#include <string_view>

namespace eduml {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace eduml

#endif  // EDUML_DIGEST_H_
