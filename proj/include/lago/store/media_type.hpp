#pragma once

#include <string>
#include <string_view>

namespace lago::store {

// MIME type from the file extension; application/octet-stream when unknown.
std::string media_type_for(std::string_view filename);

}  // namespace lago::store
