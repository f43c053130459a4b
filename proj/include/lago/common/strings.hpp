#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lago {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower(std::string_view s);

// [A-Za-z0-9._-]+ : node names, site codes, detector ids, collection ids.
bool is_token(std::string_view s);

// Fresh random (version 4) UUID in lowercase hyphenated form.
std::string generate_uuid();
bool is_uuid(std::string_view s);

}  // namespace lago
