#ifndef TRACKMODE_GEO_HPP
#define TRACKMODE_GEO_HPP

#include <string>
#include <vector>

namespace trackmode {

/// Mean earth radius in meters. All distances assume a spherical earth.
inline constexpr double kEarthRadiusM = 6371000.0;

/// Transportation modes across both class sets.
enum class Mode { bike, car, walk, bus, train, subway, airplane };

const char* mode_name(Mode m);

/// Active label vocabulary: the four-class or seven-class task.
/// Class indices follow the canonical reporting order of each set.
class ClassSet {
public:
    enum Kind { four = 4, seven = 7 };

    explicit ClassSet(Kind kind = four);

    Kind kind() const { return kind_; }
    size_t size() const { return modes_.size(); }
    const std::vector<Mode>& modes() const { return modes_; }

    bool contains(Mode m) const;
    /// Class index of a contained mode; throws std::invalid_argument otherwise.
    size_t index_of(Mode m) const;
    Mode mode_at(size_t index) const { return modes_.at(index); }

    /// Case-insensitive parse against this set's vocabulary.
    /// Returns false when the string is a mode outside the set or unknown.
    bool parse(const std::string& name, Mode& out) const;

private:
    Kind kind_;
    std::vector<Mode> modes_;
};

/// One GPS fix. Coordinates in degrees, timestamp in seconds since the
/// Unix epoch (fractional seconds allowed).
struct GpsPoint {
    double lat = 0.0;
    double lon = 0.0;
    double t = 0.0;

    GpsPoint() = default;
    /// Validates bounds: lat in [-90, 90], lon in [-180, 180], t finite.
    GpsPoint(double lat, double lon, double t);
};

/// Time-ordered fixes for one person. append() enforces strictly
/// increasing timestamps.
struct Trajectory {
    std::string person_id;
    std::vector<GpsPoint> points;

    void append(const GpsPoint& p);
    size_t size() const { return points.size(); }
};

/// Great-circle distance in meters (haversine on the spherical earth).
double haversine_distance(const GpsPoint& a, const GpsPoint& b);

/// Speed in m/s between two fixes; throws std::invalid_argument unless b.t > a.t.
double point_speed(const GpsPoint& a, const GpsPoint& b);

/// Initial great-circle bearing from a to b in degrees, [0, 360),
/// 0 = north, 90 = east. Throws std::invalid_argument on coincident coordinates.
double bearing(const GpsPoint& a, const GpsPoint& b);

/// Signed circular difference b - a mapped into (-180, 180].
double bearing_change(double a_deg, double b_deg);

} // namespace trackmode

#endif // TRACKMODE_GEO_HPP
