#pragma once

// Generated by tests/oracles/gen_oracles.py (mpmath, 40 digits). Do not edit.

#include <array>

namespace oracle {

// x, Ai, Ai', Bi, Bi'
inline constexpr std::array<std::array<double, 5>, 14> kAiry{{
    {-10000.0, 0.02705738360464258, 4.950755017249123, -0.049507543408137594, 2.7057371227760956},
    {-500.0, 0.07259012010404114, 2.1173370928026483, -0.09468857013299102, 1.623117088219345},
    {-50.25, -0.10228007262505645, -1.3160833538111238, 0.18558671286004572, -0.7241127308509164},
    {-10.5, -0.3119260350510506, 0.09095748739068167, -0.030356123264021012, -1.0116140816303776},
    {-10.0, 0.04024123848644319, 0.99626504413279, -0.3146798296438386, 0.11941411339990923},
    {-4.5, 0.2921527810559595, -0.5233625323157477, 0.2538726576969326, 0.6347447677736637},
    {-1.0, 0.5355608832923521, -0.01016056711664521, 0.1039973894969446, 0.5923756264227924},
    {0.0, 0.3550280538878172, -0.2588194037928068, 0.6149266274460007, 0.4482883573538264},
    {0.5, 0.23169360648083348, -0.2249105326646839, 0.8542770431031554, 0.5445725641405923},
    {3.0, 0.006591139357460719, -0.011912976705951319, 14.037328963730232, 22.92221496638217},
    {10.0, 1.1047532552898686e-10, -3.5206336767389237e-10, 455641153.54822516, 1429236134.4828658},
    {20.0, 1.6916728686705404e-27, -7.586391625748354e-27, 2.103765049651104e+25, 9.381839336133965e+25},
    {50.0, 4.5849417240748285e-104, -3.244331819828799e-103, 4.9090996994442195e+101, 3.4687987795459765e+102},
    {100.0, 2.6344821520881846e-291, -2.6351403616044097e-290, 6.041223996670201e+288, 6.039712745310603e+289},
}};

// F, E, x, Re zeta, Im zeta, Re zeta', Im zeta', gamma, gamma', gamma''
inline constexpr std::array<std::array<double, 10>, 24> kReference{{
    {1.0, 0.0, 0.0, 1.0899290688410055, 0.6292708412929527, -0.7945704253078977, 0.4587454489416301, 0.5235987755982989, 0.6313421607739733, 0.4602554639031846},
    {1.0, 0.0, 0.5, 0.6741575364779109, 0.843206087959033, -0.8967441590155164, 0.3617253424925608, 0.8963500134428752, 0.8580119810450145, 0.44103023935267527},
    {1.0, 0.0, 3.0, -0.3514592118628545, -0.6714308536070182, 1.1974897133634705, -0.5575852131803327, 4.23015932736752, 1.7411199481146538, 0.2818619271947827},
    {1.0, 0.0, 10.0, -0.5577554758545136, 0.0713257381205035, -0.21165600514813712, -1.7658338139957177, 21.863958957336553, 3.162770079361379, 0.15799127849628242},
    {1.0, 0.0, 57.25, 0.31146426222755513, 0.18749299558699722, -1.420003215299147, 2.355837996220292, 289.5683929128552, 7.566379275685981, 0.06608158492166262},
    {1.0, 0.0, 400.0, 0.21324584296664684, -0.06727711598585277, 1.345409044352169, 4.264958917942207, 5334.118718475897, 20.000000048828124, 0.024999999694824256},
    {1.0, 0.0, 2500.5, 0.14070058140195313, 0.014189668526872168, -0.7095684383909621, 7.035731119220237, 83359.11998062198, 50.004999750524746, 0.009999000149475355},
    {1.0, 0.0, 9999.0, -0.09994709483609551, -0.0033284037204177725, 0.3328262285344195, -9.994209652424507, 666567.4545647675, 99.99499987500938, 0.005000250018747655},
    {3.289868133696453, 1.0, 0.0, 0.5877194160779116, 0.6768172689014902, -1.0742766140548137, 0.4643559980575871, 0.8557408040939315, 1.2445616893181395, 0.9822999426730344},
    {3.289868133696453, 1.0, 0.5, -0.01925054635058737, 0.7654167352531783, -1.300805856319146, -0.22552233993357992, 1.5959414380390806, 1.7058053406391658, 0.8588328388715227},
    {3.289868133696453, 1.0, 3.0, -0.10062045916475795, 0.5411115671289777, -1.778725182564617, -0.3727992227630511, 8.03783316948376, 3.3011340183832107, 0.49583183492837396},
    {3.289868133696453, 1.0, 10.0, -0.4136236870778601, 0.02574264147933897, -0.1398538466366062, -2.4089524456537372, 40.77854780231441, 5.8225099340743895, 0.2824639373353203},
    {3.289868133696453, 1.0, 57.25, 0.15247273805182424, 0.22231746214060813, -3.059810724466433, 2.097100433766241, 528.7572073698382, 13.760270527660877, 0.11954215757549656},
    {3.289868133696453, 1.0, 400.0, -0.16481650818959642, 0.019786241470004167, -0.7179351787868542, -5.981165188008383, 9685.410672683785, 36.28976791643536, 0.045327764723222454},
    {3.289868133696453, 1.0, 2500.5, 0.10484451269901733, -0.005695041656917836, 0.5165557058004728, 9.50987484294629, 151223.64970759826, 90.70454932558756, 0.018135077888140866},
    {3.289868133696453, 1.0, 9999.0, 0.05340791170587901, 0.05158561625060673, -9.356271498937204, 9.68678520456713, 1209074.116704209, 181.37362396124183, 0.009069312455263196},
    {4.0, -2.0, 0.0, 1.4600307602799145, 0.2405951819993496, -1.6185566091148191, 0.41819877680981876, 0.16331998585624158, 0.4567094555146451, 0.94385123222242},
    {4.0, -2.0, 0.5, 0.8650772752244662, 0.4994525977206735, -1.0010960044693422, 0.5779830476650336, 0.5235987755982989, 1.0021932101644815, 1.1597710946015045},
    {4.0, -2.0, 3.0, 0.5455368868331615, -0.1336638372983602, 0.3698787951915722, 1.742431362281291, 6.0429054108130345, 3.16980804700771, 0.6253182718648379},
    {4.0, -2.0, 10.0, -0.21223083206188237, 0.3423041219502061, -2.1046168654397777, -1.3173438049402808, 39.82490870099674, 6.164694575399928, 0.3243690961094872},
    {4.0, -2.0, 57.25, 0.14607363215664262, -0.2122140687206537, 3.19668452323288, 2.2017565125204697, 570.8019183920368, 15.066522393448691, 0.1327445204648809},
    {4.0, -2.0, 400.0, -0.1304657550732382, -0.08941099709519565, 3.574285555260394, -5.215311590533877, 10647.458309610116, 39.974992207103895, 0.05003127917416866},
    {4.0, -2.0, 2500.5, 0.09487960431141157, -0.031588932962114596, 3.1588838082589263, 9.487963590058174, 166667.4520644134, 100.00000000025, 0.01999999999975},
    {4.0, -2.0, 9999.0, 0.06955046556253569, -0.012771365715032831, 2.554079826314016, 13.909050135731215, 1333034.129981726, 199.98499943746563, 0.010000750084383595},
}};

// F, E, l, X_l
inline constexpr std::array<std::array<double, 4>, 3> kResonant{{
    {1.0, 0.0, 20, 3947.8417604156925},
    {1.0, 0.0, 50, 24674.011002722884},
    {3.289868133696453, 0.3, 30, 2699.908810921692},
}};

// F=1, E=0, lambda=1, theta0=0: n, log R(n), eta(n)
inline constexpr std::array<std::array<double, 3>, 5> kPrufer{{
    {1, 0.22995365589171538, -0.5235987755982989},
    {2, 0.6726835308415091, -0.8728475148228524},
    {10, 0.8806036407208394, -2.8091817557209477},
    {50, 1.7389545750867343, -6.458666637371135},
    {200, 1.4440675038270734, -13.318329412528543},
}};

inline constexpr double kCellMassReZeta99 = 0.04832435015085935;

// F=1, E=0, lambda=1: sum over (x_30, x_31] of e^{i(2 gamma + h)}/gamma'
inline constexpr double kRawSum30Re = 0.2469206178335684;
inline constexpr double kRawSum30Im = -0.10075974247679165;
// double sum over (x_20, x_21]
inline constexpr double kDoubleSum20Re = 0.00245035217773278;
inline constexpr double kDoubleSum20Im = -0.0037952684316769924;

// int_{-1}^{1} e^{i 1000 x^2/2} dx
inline constexpr double kFresnel1000Re = 0.0551161390319;
inline constexpr double kFresnel1000Im = 0.057818540937510564;
// u = e^{x/2}/(x+2): phi = x + x^2/4 on (0,1), omega=500; phi = x^2/2 + x^3/10 on (-1,1), omega=200
inline constexpr double kModelNonstat500Re = 0.00013013876609041216;
inline constexpr double kModelNonstat500Im = 0.0017212914840370895;
inline constexpr double kModelStat200Re = 0.05951767093351014;
inline constexpr double kModelStat200Im = 0.06148246255743446;
// u = 1 + 2x - x^2, phi = 0.3x + 0.7x^2 - 0.2x^3 on (0, 1.5), omega=40
inline constexpr double kCubic40Re = -0.01334080482636187;
inline constexpr double kCubic40Im = 0.1108922528487908;

// p, q, m, Re w_m, Im w_m
inline constexpr std::array<std::array<double, 5>, 21> kGauss{{
    {1, 2, 0, 0.0, -4.1340642196527976e-43},
    {1, 2, 1, 2.0, 0.0},
    {1, 3, 0, 1.7219155529623352e-41, 2.2958874039497803e-41},
    {1, 3, 1, 3.0, 0.0},
    {1, 3, 2, 1.1479437019748901e-41, 2.2958874039497803e-41},
    {2, 9, 0, 4.041889066001582, -3.4438311059246704e-41},
    {2, 9, 1, 2.2958874039497803e-41, -1.1479437019748901e-41},
    {2, 9, 2, 6.887662211849341e-41, 4.591774807899561e-41},
    {2, 9, 3, 7.596266658713868, -3.4438311059246704e-41},
    {2, 9, 4, 2.582873329443503e-41, -2.2958874039497803e-41},
    {2, 9, 5, 4.591774807899561e-41, 6.887662211849341e-41},
    {2, 9, 6, -2.63815572471545, -1.7219155529623352e-41},
    {2, 9, 7, 3.4438311059246704e-41, -2.2958874039497803e-41},
    {2, 9, 8, 7.461634062836786e-41, 6.887662211849341e-41},
    {1, 7, 0, 4.740938811152401, -2.2958874039497803e-41},
    {1, 7, 1, 2.4450418679126287, -2.2958874039497803e-41},
    {1, 7, 2, 2.4450418679126287, -2.2958874039497803e-41},
    {1, 7, 3, -1.6920214716300959, -3.4438311059246704e-41},
    {1, 7, 4, 2.4450418679126287, -1.7219155529623352e-41},
    {1, 7, 5, -1.6920214716300959, -3.4438311059246704e-41},
    {1, 7, 6, -1.6920214716300959, -1.1479437019748901e-41},
}};

}  // namespace oracle
