#pragma once

// Generated by tests/oracles/make_oracles.py (scipy, statsmodels). Do not edit.

namespace eegrc::oracle {

inline constexpr double kAnovaFixture[] = {4.1, 5.3, 9.0, 3.2, 4.0, 5.1, 5.5, 5.9, 11.2, 2.8, 4.4, 4.0, 4.9, 5.0, 8.3, 3.6, 5.7, 6.9};
inline constexpr double kAnovaF = 13.905746736735031;
inline constexpr double kAnovaDf1 = 2.0;
inline constexpr double kAnovaDf2 = 10.0;
inline constexpr double kAnovaPUncorrected = 0.001293840802642049;
inline constexpr double kAnovaEpsilon = 0.5819626081400542;
inline constexpr double kAnovaPCorrected = 0.009171495123770945;
inline constexpr double kPairedT[] = {-3.374352667426838, -4.867085841667881, -2.7716617963011436};
inline constexpr double kPairedP[] = {0.01979557216584621, 0.0046045664584059625, 0.03928791882121518};
inline constexpr double kFTailArgs[] = {0.5, 2.0, 40.0, 3.23, 2.0, 40.0, 12.57, 2.0, 40.0, 1.7, 1.38, 6.9, 4.0, 3.5, 17.25};
inline constexpr double kFTail[] = {0.6102709428588294, 0.050074395741796576, 5.8109179329552214e-05, 0.2439375350120142, 0.0209666159909611};
inline constexpr double kLogisticX[] = {-1.1097811666988555, -1.1285224769114701, -0.6046387643027217, 0.3123018375220959, -1.708181819652479, -0.2006263932853426, 0.9323704435959272, 0.7267182497396971, -1.3746955989193774, 0.7304112538226292, 0.03983877808621581, 1.0307252348409222, -0.15849640494062286, 0.6962761927810838, -0.5370237948785764, 0.23044273682651983, 1.059771785089693, 0.2009215061316963, 0.7135221697867717, 0.05911557726309023, 0.0035063888718675404, 1.7543976081844854, 0.6443381770301099, 0.7204331297717946, 1.208680251869896, -1.5136035844279512, 0.6257020736457793, 1.5696354504225143, 0.08506695170325625, -1.1825332514647342, -0.21502068147701456, 0.6765133593733912, -0.9869721495223135, 1.75790091564753, -0.3562943775169302, -1.7072257200328114, -1.0338860865829091, -0.5738326486780508, -0.22868870219827503, -0.6735338170102211, -0.5090184150615126, 0.735869120119668, -1.6047774536438948, -0.7296723831416928, 0.8906182714952926, 1.5337808926894374, 0.6191606326352904, 0.49036641510776624, -0.23049255533614219, -0.7835667463871693, -0.6878400162699064, -0.31121003797187163, 0.07751550072404824, -0.13935556184752051, -1.161334756222772, 0.40387196732099295, 1.1590554779375086, 3.0117321180099195, -1.6834903150660199, -0.6810311343335331, 0.44078685177454413, 0.3375283299751047, -0.6791355419199061, -1.8418724690898234, -0.510773993860878, -0.15688382414811833, -1.3705715233466476, 0.796456353627287, -0.5186316846386702, 0.23589854631734553, -0.9554825534803278, 0.12657905192706054, 0.566284377484457, 0.08166013766379027, 0.8668962157520058, -0.0922707541127601, 0.32027965876184816, 0.9325161457942035, -1.2553970123943832, 0.702604964831856, 0.7542583688710075, -1.244358068233674, -0.15608411456412252, -0.06944344768713344, 0.3855058586800546, -0.43017413450190745, 0.020510907338833494, -1.4933356862886111, -0.502480003970424, 0.5424817481647038, -1.0852873402718468, 0.3810661081594194, 0.8730213944379539, -2.279736688084847, 0.777218603170692, 2.28072770731796, -0.655197797374215, 1.5196453610280318, -0.11900384074555334, -0.6176508743404746, -0.9760291303096262, 0.37650206969597627, 1.326849424740064, 0.7159376259150992, 1.2517887210092173, -0.6573220907066394, -0.5858839293572906, -0.021625123514882955, 0.47361645756863663, -0.6427217981244338, 0.853709493013713, 0.08084383907476383, -1.0786556843962727, 0.43854761846775875, -1.93794008542919, 0.9340839425233304, 0.5243407394661029, 0.1575324580727005, -0.7468720199247207, -0.388856126688961};
inline constexpr double kLogisticY[] = {1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0};
inline constexpr double kLogisticL2 = 0.01;
inline constexpr double kLogisticWeights[] = {1.4282135339329325, -2.4436519765020392, 1.2887573597190665};
inline constexpr double kLogisticBias = 1.1637474486553472;
inline constexpr double kFiltfiltProbeIndex[] = {0.0, 1.0, 17.0, 250.0, 499.0, 500.0, 731.0, 998.0, 999.0};
inline constexpr double kFiltfiltProbe[] = {0.021020405432031236, 0.07226473968048658, 0.7438856451325527, -0.13423998023699532, -0.2666764781559463, -0.21740261308713466, -0.8391083816083338, 0.08910204066032024, -0.013484639611761606};
inline constexpr double kButterFreqs[] = {0.25, 1.0, 10.0, 30.0, 50.0, 100.0};
inline constexpr double kButterGain[] = {0.05935112987455988, 0.998709425867154, 0.9999785031447084, 0.7071067811865477, 0.11300505566470727, 0.004467128320370335};

}  // namespace eegrc::oracle
