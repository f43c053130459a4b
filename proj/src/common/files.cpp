#include "lago/common/files.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "lago/common/error.hpp"
#include "lago/common/strings.hpp"

namespace lago {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp-" + generate_uuid().substr(0, 8);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string(), path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string(), path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string(), path.string());
  }
}

void append_line(const std::filesystem::path& path, std::string_view line, bool sync) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::StorageError, "cannot open " + path.string(), path.string());
  std::string buf(line);
  buf.push_back('\n');
  std::size_t done = 0;
  while (done < buf.size()) {
    const auto n = ::write(fd, buf.data() + done, buf.size() - done);
    if (n <= 0) {
      ::close(fd);
      throw Error(ErrorCode::StorageError, "append failed on " + path.string(), path.string());
    }
    done += static_cast<std::size_t>(n);
  }
  if (sync) ::fdatasync(fd);
  ::close(fd);
}

bool is_empty_or_absent_dir(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return true;
  if (!std::filesystem::is_directory(path, ec)) return false;
  return std::filesystem::directory_iterator(path, ec) == std::filesystem::directory_iterator{};
}

}  // namespace lago
