#include "trackmode/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trackmode {

namespace {

constexpr double kPi = 3.141592653589793238462643;

double deg2rad(double d) { return d * (kPi / 180.0); }
double rad2deg(double r) { return r * (180.0 / kPi); }

} // namespace

const char* mode_name(Mode m) {
    switch (m) {
    case Mode::bike: return "bike";
    case Mode::car: return "car";
    case Mode::walk: return "walk";
    case Mode::bus: return "bus";
    case Mode::train: return "train";
    case Mode::subway: return "subway";
    case Mode::airplane: return "airplane";
    }
    return "?";
}

ClassSet::ClassSet(Kind kind) : kind_(kind) {
    if (kind == four) {
        modes_ = {Mode::bike, Mode::car, Mode::walk, Mode::bus};
    } else {
        modes_ = {Mode::train,  Mode::car,      Mode::walk, Mode::bus,
                  Mode::subway, Mode::airplane, Mode::bike};
    }
}

bool ClassSet::contains(Mode m) const {
    return std::find(modes_.begin(), modes_.end(), m) != modes_.end();
}

size_t ClassSet::index_of(Mode m) const {
    auto it = std::find(modes_.begin(), modes_.end(), m);
    if (it == modes_.end())
        throw std::invalid_argument(std::string("mode '") + mode_name(m) +
                                    "' is not in the active class set");
    return static_cast<size_t>(it - modes_.begin());
}

bool ClassSet::parse(const std::string& name, Mode& out) const {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Mode m : modes_) {
        if (lower == mode_name(m)) {
            out = m;
            return true;
        }
    }
    return false;
}

GpsPoint::GpsPoint(double lat_, double lon_, double t_) : lat(lat_), lon(lon_), t(t_) {
    if (!(lat >= -90.0 && lat <= 90.0))
        throw std::invalid_argument("latitude out of [-90, 90]");
    if (!(lon >= -180.0 && lon <= 180.0))
        throw std::invalid_argument("longitude out of [-180, 180]");
    if (!std::isfinite(t)) throw std::invalid_argument("timestamp must be finite");
}

void Trajectory::append(const GpsPoint& p) {
    if (!points.empty() && p.t <= points.back().t)
        throw std::invalid_argument("trajectory timestamps must strictly increase");
    points.push_back(p);
}

double haversine_distance(const GpsPoint& a, const GpsPoint& b) {
    const double phi1 = deg2rad(a.lat);
    const double phi2 = deg2rad(b.lat);
    const double dphi = deg2rad(b.lat - a.lat);
    const double dlam = deg2rad(b.lon - a.lon);
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    const double c = 2.0 * std::atan2(std::sqrt(h), std::sqrt(std::max(0.0, 1.0 - h)));
    return kEarthRadiusM * c;
}

double point_speed(const GpsPoint& a, const GpsPoint& b) {
    const double dt = b.t - a.t;
    if (dt <= 0.0)
        throw std::invalid_argument("point_speed: non-positive time delta (corrupt ordering)");
    return haversine_distance(a, b) / dt;
}

double bearing(const GpsPoint& a, const GpsPoint& b) {
    if (a.lat == b.lat && a.lon == b.lon)
        throw std::invalid_argument("bearing: coincident points");
    const double phi1 = deg2rad(a.lat);
    const double phi2 = deg2rad(b.lat);
    const double dlam = deg2rad(b.lon - a.lon);
    const double y = std::sin(dlam) * std::cos(phi2);
    const double x =
        std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
    double deg = rad2deg(std::atan2(y, x));
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

double bearing_change(double a_deg, double b_deg) {
    double d = std::fmod(b_deg - a_deg, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    return d;
}

} // namespace trackmode
