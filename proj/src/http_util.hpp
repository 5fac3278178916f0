#pragma once

#include <string>
#include <string_view>

namespace cuediary::detail {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // at least "/"
};

/// Splits "https://api.example.com:8443/v1/chat" into origin and path.
/// Throws Error(InvalidArgument) for anything that is not http(s).
SplitUrl split_url(std::string_view url);

}  // namespace cuediary::detail
