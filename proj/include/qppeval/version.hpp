#ifndef QPPEVAL_VERSION_HPP
#define QPPEVAL_VERSION_HPP

namespace qpp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qpp

#endif  // QPPEVAL_VERSION_HPP
