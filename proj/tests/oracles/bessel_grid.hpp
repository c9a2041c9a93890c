#ifndef NSFSA_TEST_BESSEL_GRID_HPP
#define NSFSA_TEST_BESSEL_GRID_HPP

namespace nsfsa::test {

struct KCase {
  double order;
  double x;
  double value;
};

// High-precision reference values (40-digit arithmetic), rounded to 18 digits.
inline const KCase kBesselGrid[] = {
    {0.05, 0.001, 7.18265436538876905},
    {0.05, 0.1, 2.43701927720116839},
    {0.05, 0.5, 9.25833241623740575e-1},
    {0.05, 1.0, 4.21409355154103479e-1},
    {0.05, 1.9, 1.28915749990553173e-1},
    {0.05, 2.0, 1.13952913668369035e-1},
    {0.05, 2.1, 1.0083385037518562e-1},
    {0.05, 5.0, 3.69194429343367582e-3},
    {0.05, 10.0, 1.77821842448525675e-5},
    {0.05, 50.0, 3.41025217037854027e-23},
    {0.05, 200.0, 1.22568962126431406e-88},
    {0.05, 600.0, 1.35583135329093082e-262},
    {0.5, 0.001, 3.95936595131166432e+1},
    {0.5, 0.1, 3.58616683879726003},
    {0.5, 0.5, 1.07504760349992024},
    {0.5, 1.0, 4.61068504447894558e-1},
    {0.5, 1.9, 1.35995213265667973e-1},
    {0.5, 2.0, 1.19937771968061447e-1},
    {0.5, 2.1, 1.05908758996953578e-1},
    {0.5, 5.0, 3.77661337464288256e-3},
    {0.5, 10.0, 1.79934780937051796e-5},
    {0.5, 50.0, 3.41862009545707464e-23},
    {0.5, 200.0, 1.22644636403464943e-88},
    {0.5, 600.0, 1.35611078966931109e-262},
    {1.0, 0.001, 9.99996238156085553e+2},
    {1.0, 0.1, 9.85384478087060557},
    {1.0, 0.5, 1.65644112000330089},
    {1.0, 1.0, 6.01907230197234575e-1},
    {1.0, 1.9, 1.59660153032667629e-1},
    {1.0, 2.0, 1.39865881816522427e-1},
    {1.0, 2.1, 1.22746411533507896e-1},
    {1.0, 5.0, 4.04461344545216421e-3},
    {1.0, 10.0, 1.86487734538255846e-5},
    {1.0, 50.0, 3.44410222671755561e-23},
    {1.0, 200.0, 1.22874237347298581e-88},
    {1.0, 600.0, 1.35695791811280609e-262},
    {1.5, 0.001, 3.9633253172629759e+4},
    {1.5, 0.1, 3.94478352267698583e+1},
    {1.5, 0.5, 3.22514281049976072},
    {1.5, 1.0, 9.22137008895789117e-1},
    {1.5, 1.9, 2.07571641300230068e-1},
    {1.5, 2.0, 1.79906657952092171e-1},
    {1.5, 2.1, 1.5634150137645528e-1},
    {1.5, 5.0, 4.53193604957145907e-3},
    {1.5, 10.0, 1.97928259030756976e-5},
    {1.5, 50.0, 3.48699249736621613e-23},
    {1.5, 200.0, 1.23257859585482268e-88},
    {1.5, 600.0, 1.35837097431875994e-262},
    {2.3, 0.001, 2.28193116825203958e+7},
    {2.3, 0.1, 5.72096866928289746e+2},
    {2.3, 0.5, 1.35096538813036395e+1},
    {2.3, 1.0, 2.42055793692092381},
    {2.3, 1.9, 3.84104501464207012e-1},
    {2.3, 2.0, 3.25108647042479549e-1},
    {2.3, 2.1, 2.76389113486668368e-1},
    {2.3, 5.0, 5.96135031744110198e-3},
    {2.3, 10.0, 2.28673517340050193e-5},
    {2.3, 50.0, 3.59352924578595819e-23},
    {2.3, 200.0, 1.24195826369843502e-88},
    {2.3, 600.0, 1.36181366757423674e-262},
    {2.5, 0.001, 1.18899799111548788e+8},
    {2.5, 0.1, 1.18702122364189294e+3},
    {2.5, 0.5, 2.04259044664984845e+1},
    {2.5, 1.0, 3.22747953113526191},
    {2.5, 1.9, 4.63739910055504937e-1},
    {2.5, 2.0, 3.89797758896199704e-1},
    {2.5, 2.1, 3.29253760963318255e-1},
    {2.5, 5.0, 6.495775004385758e-3},
    {2.5, 10.0, 2.39313258646278889e-5},
    {2.5, 50.0, 3.6278396452990476e-23},
    {2.5, 200.0, 1.24493504297247177e-88},
    {2.5, 600.0, 1.36290264454090489e-262},
};

}  // namespace nsfsa::test

#endif  // NSFSA_TEST_BESSEL_GRID_HPP
