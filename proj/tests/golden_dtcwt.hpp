// Generated by tests/oracles/dtcwt_golden.py; do not edit.
#pragma once

namespace golden {

// near_sym_a + qshift_a, input golden_input(16, 24), J=3
inline constexpr double lowpass_sum_a = -11.933634846482635;
inline constexpr double lowpass_sq_a = 36.25749680091057;
inline constexpr double lowpass_at_1_2_a = -0.6866052248004124;
inline constexpr double highpass_a[3][6][5] = {
    {{2.695058658504191, 0.0526840088344136, 6.43283494676649, 0.1547756632885008, -0.20973587891857534},
     {-4.440892098500626e-16, -3.1916610513754327, 7.062556464106948, 0.0643821086013765, -0.002636229548294069},
     {3.0377036277846594, 0.6776954977720336, 63.5589528565097, 0.3647148559008041, -0.08867744309934614},
     {-0.6776954977720314, -3.037703627784661, 61.1695205970844, -0.10276641841608178, -0.13828616925644943},
     {3.191661051375433, 2.220446049250313e-16, 6.985844293705433, -0.021256303750963587, 0.0022160295968871716},
     {-0.0526840088344116, 2.695058658504192, 6.400064103327009, -0.17631637686649587, -0.028016921231358266}},
    {{-0.6662686954629676, 1.1475446724474816, 2.598936420420653, 0.11761306938034671, 0.06985106278297301},
     {0.7096113098868166, 1.0498755393366523, 1.6413487601276975, -0.28144315841422, 0.2700350133690074},
     {0.3924712060474258, 0.5788609074604583, 25.222081087746233, 0.5512400486952787, 0.7450380039707589},
     {0.5364066021641656, 1.6205110979759465, 17.684833105489133, 0.22787835263812836, -0.20041369025405692},
     {0.9616843861934673, 1.413563297607771, 1.3268568218425356, -0.0041550379150810945, -0.023614389131696334},
     {2.2772313857555537, -0.9526495789294702, 2.715385048287037, -0.039413356735213505, 0.01671841507175471}},
    {{0.20753123537872792, 0.5650421535241889, 2.8674306001063434, 0.43438953098475286, 0.12307225050338885},
     {0.6505663292517407, 0.15694589326964406, 4.117244991897241, 0.18775873923532188, -0.22875202515454815},
     {-0.5633937159570049, 2.300371684275691, 13.540756046504038, -0.3776294759768155, 0.3627957334905801},
     {-0.5167536117290698, 0.8571599300474582, 2.6889799164429156, 0.06590960986808056, -0.4150476243740831},
     {-0.8163654413954007, 0.15791785714648898, 1.397632415970056, 0.012313823010687591, 0.27100308374159826},
     {1.442932167358543, 0.21671789750580384, 1.5358515916921474, -0.3016458537094787, 0.24597508675821314}},
};

// near_sym_b + qshift_b, input golden_input(16, 24), J=3
inline constexpr double lowpass_sum_b = -11.93362937049099;
inline constexpr double lowpass_sq_b = 36.7802863126091;
inline constexpr double lowpass_at_1_2_b = -0.8738945826141127;
inline constexpr double highpass_b[3][6][5] = {
    {{2.5751662492921943, 0.01994392364796127, 6.1478014127111935, 0.07653862110003046, -0.09057507228687461},
     {3.3306690738754696e-16, -3.130446771614185, 6.767058052253409, -0.0038524990003018897, 0.024767953444281534},
     {2.821496002505387, 1.0191517016764284, 65.37917936777201, 0.2497616314955169, 0.13643969435802356},
     {-1.0191517016764282, -2.8214960025053877, 62.665561773266134, 0.06919978424652917, -0.1266846401928664},
     {3.1304467716141846, 2.220446049250313e-16, 6.6577986728096485, 0.01083925338930936, -0.01105216578743046},
     {-0.019943923647960493, 2.575166249292194, 6.243116917481387, -0.08185588855071144, -0.022803896499408255}},
    {{-1.0886835488556312, 1.1844534830256563, 2.802404329782076, 0.06288283770408032, 0.14543834396217753},
     {0.8703567697609408, 0.9959482788858585, 1.8339029686815052, -0.23751648435329398, 0.21973767464785632},
     {-0.3134412187727831, 0.4221242504002286, 25.427422048909904, 0.23057453546684165, 0.798025011287364},
     {0.6931561841101851, 1.3936208886767476, 15.851816193700605, 0.34402828485389786, -0.08260982442708276},
     {1.0156085399686594, 1.4593256428430261, 1.2782931934992776, 0.004122040259744733, -0.02817745505523453},
     {2.2403355000631713, -1.3581173043499009, 2.836114104739047, -0.020737750481688126, -0.010958119248410308}},
    {{0.22707148862826926, 0.5329210495069994, 2.8410627610653973, 0.4246608525834623, 0.12802869330938926},
     {0.6898035916475467, 0.4832147457224693, 4.3023651045729965, 0.2870905475231489, -0.24905266519100283},
     {-0.6479444014017695, 2.005304854306612, 12.468852413428682, -0.2761063270622438, 0.4121605876979313},
     {-0.5022618286582377, 0.9022512081898104, 3.6190054072152007, -0.2500428302902368, -0.5984057851818789},
     {-1.0083167780927076, 0.061131985137578504, 1.8589328234106823, 0.15029163819233585, 0.46269444967095935},
     {1.3367794761738687, 0.2932003848456596, 1.6474315193710336, -0.2674898286570969, 0.28123998048288196}},
};

}  // namespace golden
