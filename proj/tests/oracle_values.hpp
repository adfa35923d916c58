#pragma once

// Generated by tests/oracles/generate.py (mpmath, 40 digits).

namespace oracle {

struct Occupation { double omega_a, temperature, n_th; };
inline constexpr Occupation kOccupation[] = {
    {0.99, 0.3, 0.038295631591983342351},
    {0.5, 0.01, 1.928749847963917783e-22},
    {1, 1, 0.58197670686932642439},
    {0.99, 0.05, 2.5174987257760796683e-9},
    {0.2, 2, 9.508331944775049624},
};

struct SteadyXX { double temperature, omega_a, delta_p, f_T, f_wA, f_gamma; };
inline constexpr SteadyXX kSteadyXX[] = {
    {0.01, 0.5, -0.39574964877218671468, 6.2515491087934236529e-36, 2.449462061038176645, 6.566863479372635649e-4},
    {0.3, 0.99, -0.4612549097604742011, 3.7769560905853976899, 0.39614067275834313242, 1.2067671923889004546e-3},
    {1, 0.745, -0.16871798930899697978, 0.10849125849345369907, 0.34067775761323334106, 2.0173470199801968904e-3},
    {0.5075, 0.6225, -0.24255771511599721265, 0.74493065361600862084, 1.2151441236576872678, 1.0968998850478661057e-3},
    {0.1, 0.99, -0.49655790462677307238, 7.1032740850540268565e-3, 0.023004804639607444722, 0.011309027922230883692},
};

// Probe Bloch vector from |g>|e> at default parameters.
struct ProbeBloch { const char* interaction; double t, x, y, z; };
inline constexpr ProbeBloch kProbeBloch[] = {
    {"XX", 10, 0.0, 0.0, -0.20117912429982220633},
    {"XX", 1000, 0.0, 0.0, -0.92250981951670011576},
    {"XXplusZX", 10, 0.058837135228758905457, -0.18422632204183378985, -0.20322173893123074977},
    {"XXplusZX", 1000, -0.011884880011659640768, -5.3435410469320709664e-8, -0.92258612600974191117},
    {"ZX", 10, 0.0, 0.0, -1.0},
    {"ZX", 1000, 0.0, 0.0, -1.0},
    {"XZ", 10, -0.14056940932907002461, -0.12172678232217182731, -0.94870177164750393676},
    {"XZ", 1000, 0.16329748153006223323, 0.13264299854083412629, -0.77087501478029230524},
};

// Probe QFI for the temperature at t from |g>|e>, default parameters.
struct ProbeQfi { const char* interaction; double t, qfi; };
inline constexpr ProbeQfi kProbeQfi[] = {
    {"XX", 100, 0.45015354695671491485},
    {"XX", 2000, 3.7769560905853976899},
    {"XXplusZX", 100, 0.43878030996116664221},
    {"XXplusZX", 2000, 3.7853775613530365621},
    {"XZ", 100, 0.19538171898907949312},
    {"XZ", 2000, 12.263134935327109674},
};

// Trace distance of the |+>|e>, |->|e> pair at default parameters.
struct Distance { const char* interaction; double t, distance; };
inline constexpr Distance kDistance[] = {
    {"XX", 5, 0.91358070425970292306},
    {"XX", 50, 0.40577183475962503195},
    {"XX", 500, 6.1278800732182097848e-4},
    {"XZ", 5, 0.99233889970793645353},
    {"XZ", 50, 0.97019934533063627775},
    {"XZ", 500, 0.93155265937524269582},
};

}  // namespace oracle
