#ifndef TRACKMODE_ERROR_HPP
#define TRACKMODE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace trackmode {

/// Malformed or inconsistent input data (bad file contents, mismatched
/// shapes between artifacts, unknown mode strings).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
    DataError(const std::string& msg, size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

    size_t line() const { return line_; }

private:
    size_t line_ = 0;
};

/// Invalid configuration value or unusable combination of options.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& msg, size_t epoch, size_t batch)
        : std::runtime_error(msg + " (epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch) + ")"),
          epoch_(epoch),
          batch_(batch) {}

    size_t epoch() const { return epoch_; }
    size_t batch() const { return batch_; }

private:
    size_t epoch_;
    size_t batch_;
};

} // namespace trackmode

#endif // TRACKMODE_ERROR_HPP
