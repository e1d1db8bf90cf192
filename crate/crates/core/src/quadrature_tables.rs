// Generated coefficient tables: barycentric point, weight relative to the
// triangle area. DUNAVANT_* are the classical fully symmetric rules refined
// to double precision; CONICAL_* are collapsed Gauss-Jacobi x Gauss-Legendre
// products.

const DUNAVANT_4: [([f64; 3], f64); 6] = [
    ([0.10810301816807023, 0.4459484909159649, 0.4459484909159649], 0.22338158967801147),
    ([0.4459484909159649, 0.10810301816807023, 0.4459484909159649], 0.22338158967801147),
    ([0.4459484909159649, 0.4459484909159649, 0.10810301816807023], 0.22338158967801147),
    ([0.8168475729804585, 0.09157621350977074, 0.09157621350977074], 0.10995174365532187),
    ([0.09157621350977074, 0.8168475729804585, 0.09157621350977074], 0.10995174365532187),
    ([0.09157621350977074, 0.09157621350977074, 0.8168475729804585], 0.10995174365532187),
];

const DUNAVANT_5: [([f64; 3], f64); 7] = [
    ([0.3333333333333333, 0.3333333333333333, 0.3333333333333333], 0.225),
    ([0.05971587178976982, 0.4701420641051151, 0.4701420641051151], 0.1323941527885062),
    ([0.4701420641051151, 0.05971587178976982, 0.4701420641051151], 0.1323941527885062),
    ([0.4701420641051151, 0.4701420641051151, 0.05971587178976982], 0.1323941527885062),
    ([0.7974269853530873, 0.10128650732345634, 0.10128650732345634], 0.12593918054482714),
    ([0.10128650732345634, 0.7974269853530873, 0.10128650732345634], 0.12593918054482714),
    ([0.10128650732345634, 0.10128650732345634, 0.7974269853530873], 0.12593918054482714),
];

const DUNAVANT_6: [([f64; 3], f64); 12] = [
    ([0.5014265096581791, 0.24928674517091043, 0.24928674517091043], 0.11678627572637937),
    ([0.24928674517091043, 0.5014265096581791, 0.24928674517091043], 0.11678627572637937),
    ([0.24928674517091043, 0.24928674517091043, 0.5014265096581791], 0.11678627572637937),
    ([0.8738219710169955, 0.06308901449150223, 0.06308901449150223], 0.05084490637020682),
    ([0.06308901449150223, 0.8738219710169955, 0.06308901449150223], 0.05084490637020682),
    ([0.06308901449150223, 0.06308901449150223, 0.8738219710169955], 0.05084490637020682),
    ([0.053145049844816945, 0.3103524510337844, 0.6365024991213987], 0.08285107561837357),
    ([0.053145049844816945, 0.6365024991213987, 0.3103524510337844], 0.08285107561837357),
    ([0.3103524510337844, 0.053145049844816945, 0.6365024991213987], 0.08285107561837357),
    ([0.3103524510337844, 0.6365024991213987, 0.053145049844816945], 0.08285107561837357),
    ([0.6365024991213987, 0.053145049844816945, 0.3103524510337844], 0.08285107561837357),
    ([0.6365024991213987, 0.3103524510337844, 0.053145049844816945], 0.08285107561837357),
];

const CONICAL_7: [([f64; 3], f64); 16] = [
    ([0.8774288093304677, 0.057104196114517725, 0.06546699455501445], 0.0471367363867648),
    ([0.6317312516411252, 0.057104196114517725, 0.311164552244357], 0.08837017704472372),
    ([0.311164552244357, 0.057104196114517725, 0.6317312516411252], 0.08837017704472372),
    ([0.06546699455501448, 0.057104196114517725, 0.8774288093304677], 0.0471367363867648),
    ([0.6729468631505064, 0.2768430136381238, 0.05021012321136978], 0.07077613579617179),
    ([0.4845083266304333, 0.2768430136381238, 0.23864865973144292], 0.13268843221409932),
    ([0.23864865973144295, 0.2768430136381238, 0.48450832663043325], 0.13268843221409932),
    ([0.05021012321136986, 0.2768430136381238, 0.6729468631505063], 0.07077613579617179),
    ([0.38749748340669415, 0.5835904323689168, 0.028912084224389012], 0.045168098564739814),
    ([0.2789904634965088, 0.5835904323689168, 0.13741910413457437], 0.08467944904349252),
    ([0.13741910413457437, 0.5835904323689168, 0.2789904634965088], 0.08467944904349252),
    ([0.028912084224389012, 0.5835904323689168, 0.38749748340669415], 0.045168098564739814),
    ([0.1300560792168344, 0.8602401356562195, 0.00970378512694611], 0.010846451821050507),
    ([0.09363778443732848, 0.8602401356562195, 0.046122079906452035], 0.020334519128957576),
    ([0.046122079906452035, 0.8602401356562195, 0.09363778443732848], 0.020334519128957576),
    ([0.009703785126946113, 0.8602401356562195, 0.1300560792168344], 0.010846451821050507),
];

const CONICAL_9: [([f64; 3], f64); 25] = [
    ([0.9151475493787276, 0.03980985705146872, 0.04504259356980374], 0.022930160703185036),
    ([0.7386115333961522, 0.03980985705146872, 0.2215786095523792], 0.046322443858996684),
    ([0.48009507147426567, 0.03980985705146872, 0.48009507147426567], 0.05505797132893952),
    ([0.2215786095523793, 0.03980985705146872, 0.738611533396152], 0.046322443858996684),
    ([0.04504259356980378, 0.03980985705146872, 0.9151475493787276], 0.022930160703185036),
    ([0.7643653297812807, 0.1980134178736082, 0.037621252345111204], 0.03960816626409472),
    ([0.6169158718590024, 0.1980134178736082, 0.18507071026738944], 0.08001457477232092),
    ([0.4009932910631959, 0.1980134178736082, 0.4009932910631959], 0.09510379411590811),
    ([0.18507071026738953, 0.1980134178736082, 0.6169158718590023], 0.08001457477232092),
    ([0.03762125234511127, 0.1980134178736082, 0.7643653297812806], 0.03960816626409472),
    ([0.535660544808143, 0.43797481024738616, 0.026364644944470925], 0.03468301286273139),
    ([0.43232925297035973, 0.43797481024738616, 0.1296959367822541], 0.07006500900674346),
    ([0.2810125948763069, 0.43797481024738616, 0.2810125948763069], 0.08327793043038997),
    ([0.12969593678225416, 0.43797481024738616, 0.4323292529703597], 0.07006500900674346),
    ([0.026364644944470994, 0.43797481024738616, 0.5356605448081428], 0.03468301286273139),
    ([0.2902499322507925, 0.6954642733536361, 0.014285794395571387], 0.017510998364327658),
    ([0.23425943463808213, 0.6954642733536361, 0.07027629200828171], 0.03537490422096694),
    ([0.15226786332318193, 0.6954642733536361, 0.15226786332318193], 0.042045934974644164),
    ([0.07027629200828173, 0.6954642733536361, 0.23425943463808213], 0.03537490422096694),
    ([0.014285794395571427, 0.6954642733536361, 0.29024993225079243], 0.017510998364327658),
    ([0.09391279733377998, 0.9014649142011736, 0.00462228846504643], 0.0037311043337556805),
    ([0.07579660273506239, 0.9014649142011736, 0.022738483063764033], 0.007537403390655253),
    ([0.04926754289941321, 0.9014649142011736, 0.04926754289941321], 0.008958813594562732),
    ([0.02273848306376404, 0.9014649142011736, 0.07579660273506238], 0.007537403390655253),
    ([0.004622288465046434, 0.9014649142011736, 0.09391279733377998], 0.0037311043337556805),
];

const CONICAL_11: [([f64; 3], f64); 36] = [
    ([0.9379082062257551, 0.02931642715978494, 0.03277536661445988], 0.012388530705317723),
    ([0.8062543312453876, 0.02931642715978494, 0.16442924159482744], 0.026086788660165734),
    ([0.6011536484678384, 0.02931642715978494, 0.36952992437237664], 0.03383501136002543),
    ([0.36952992437237664, 0.02931642715978494, 0.6011536484678384], 0.03383501136002543),
    ([0.1644292415948274, 0.02931642715978494, 0.8062543312453876], 0.026086788660165734),
    ([0.0327753666144599, 0.02931642715978494, 0.9379082062257551], 0.012388530705317723),
    ([0.8231560673189565, 0.1480785996684843, 0.028765333012559118], 0.023221749533995015),
    ([0.707609913381099, 0.1480785996684843, 0.14431148695041665], 0.04889852451611564),
    ([0.5276030957427397, 0.1480785996684843, 0.324318304588776], 0.06342222318140801),
    ([0.324318304588776, 0.1480785996684843, 0.5276030957427397], 0.06342222318140801),
    ([0.14431148695041662, 0.1480785996684843, 0.707609913381099], 0.04889852451611564),
    ([0.028765333012559124, 0.1480785996684843, 0.8231560673189565], 0.023221749533995015),
    ([0.640628436740815, 0.3369846902811543, 0.022386872978030627], 0.024121212808530176),
    ([0.550703627937892, 0.3369846902811543, 0.1123116817809537], 0.05079254317809527),
    ([0.4106117416423277, 0.3369846902811543, 0.252403568076518], 0.06587879780157337),
    ([0.252403568076518, 0.3369846902811543, 0.4106117416423277], 0.06587879780157337),
    ([0.11231168178095374, 0.3369846902811543, 0.550703627937892], 0.05079254317809527),
    ([0.02238687297803066, 0.3369846902811543, 0.640628436740815], 0.024121212808530176),
    ([0.42642691786177866, 0.5586715187715502, 0.014901563366671153], 0.016903071593886217),
    ([0.3665695077658007, 0.5586715187715502, 0.07475897346264909], 0.035593151994052524),
    ([0.273318962107258, 0.5586715187715502, 0.16800951912119183], 0.04616492730271646),
    ([0.16800951912119183, 0.5586715187715502, 0.273318962107258], 0.04616492730271646),
    ([0.07475897346264909, 0.5586715187715502, 0.3665695077658007], 0.035593151994052524),
    ([0.014901563366671144, 0.5586715187715502, 0.42642691786177866], 0.016903071593886217),
    ([0.22297426326865907, 0.7692338620300545, 0.007791874701286429], 0.007530596425383336),
    ([0.19167543723712124, 0.7692338620300545, 0.039090700732824245], 0.01585733466759296),
    ([0.1429156829939483, 0.7692338620300545, 0.08785045497599718], 0.02056723445753266),
    ([0.0878504549759972, 0.7692338620300545, 0.1429156829939483], 0.02056723445753266),
    ([0.03909070073282425, 0.7692338620300545, 0.19167543723712124], 0.01585733466759296),
    ([0.007791874701286422, 0.7692338620300545, 0.22297426326865907], 0.007530596425383336),
    ([0.07058763152758872, 0.926945671319741, 0.002466697152670245], 0.0014970851224726347),
    ([0.060679268262818914, 0.926945671319741, 0.012375060417440052], 0.0031524435080471755),
    ([0.04524324656489835, 0.926945671319741, 0.027811082115360607], 0.004088773183089718),
    ([0.027811082115360604, 0.926945671319741, 0.04524324656489836], 0.004088773183089718),
    ([0.012375060417440055, 0.926945671319741, 0.06067926826281891], 0.0031524435080471755),
    ([0.0024666971526702414, 0.926945671319741, 0.07058763152758872], 0.0014970851224726347),
];

