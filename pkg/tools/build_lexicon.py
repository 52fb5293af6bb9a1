"""Regenerate src/stylometrics/assets/lexicon.tsv from the word lists below."""
from pathlib import Path

NOUNS = """
ship sea sailor wave island captain boat harbor storm wind shore deck anchor sail voyage crew
soldier army war battle enemy sword gun fort camp general officer flag horse march victory
mother father child family home house garden kitchen table door window room sister brother baby
love heart kiss lady gentleman marriage wedding letter dance ball rose flower friend smile joy
king queen crown court castle throne prince lord servant knight palace duke blood death grave
sin soul god heaven hell church prayer faith angel spirit devil grace mercy judgment sorrow
forest tree river mountain field hill valley sky sun moon star earth light night morning cloud
book school teacher lesson word page story question answer idea reason mind thought truth knowledge
money business trade market price bank merchant debt bill plague street city town village road
fear danger terror pain grief hate anger misery despair murder crime prison ghost shadow tear
hope peace comfort delight pleasure kindness beauty happiness laughter song music gift treasure
chapter time day year man woman people hand eye face head voice life world way thing place
""".split()

IRREGULAR_PLURALS = {"man": "men", "woman": "women", "child": "children", "foot": "feet",
                     "person": "people", "baby": "babies", "lady": "ladies", "family": "families",
                     "army": "armies", "enemy": "enemies", "story": "stories", "city": "cities",
                     "sky": "skies", "body": "bodies", "duke": "dukes", "judgment": "judgments",
                     "misery": "miseries", "kindness": "kindnesses", "happiness": "happinesses",
                     "church": "churches", "match": "matches", "knowledge": "knowledge",
                     "people": "peoples", "peace": "peace", "faith": "faiths", "grace": "graces",
                     "business": "businesses", "glass": "glasses", "kiss": "kisses",
                     "mercy": "mercies", "treasure": "treasures", "sorrow": "sorrows",
                     "money": "monies", "grief": "griefs", "terror": "terrors", "music": "music",
                     "marriage": "marriages", "harbor": "harbors", "laughter": "laughter"}

# base, 3sg, past, past participle, -ing
VERBS = """
sail sails sailed sailed sailing
row rows rowed rowed rowing
sink sinks sank sunk sinking
swim swims swam swum swimming
fight fights fought fought fighting
march marches marched marched marching
shoot shoots shot shot shooting
kill kills killed killed killing
hunt hunts hunted hunted hunting
win wins won won winning
love loves loved loved loving
kiss kisses kissed kissed kissing
dance dances danced danced dancing
marry marries married married marrying
smile smiles smiled smiled smiling
laugh laughs laughed laughed laughing
sing sings sang sung singing
play plays played played playing
pray prays prayed prayed praying
die dies died died dying
weep weeps wept wept weeping
suffer suffers suffered suffered suffering
fear fears feared feared fearing
hate hates hated hated hating
rule rules ruled ruled ruling
command commands commanded commanded commanding
serve serves served served serving
read reads read read reading
write writes wrote written writing
learn learns learned learned learning
teach teaches taught taught teaching
think thinks thought thought thinking
know knows knew known knowing
buy buys bought bought buying
sell sells sold sold selling
pay pays paid paid paying
grow grows grew grown growing
shine shines shone shone shining
walk walks walked walked walking
run runs ran run running
see sees saw seen seeing
say says said said saying
go goes went gone going
come comes came come coming
take takes took taken taking
give gives gave given giving
make makes made made making
find finds found found finding
sit sits sat sat sitting
sleep sleeps slept slept sleeping
eat eats ate eaten eating
speak speaks spoke spoken speaking
hear hears heard heard hearing
cry cries cried cried crying
hope hopes hoped hoped hoping
help helps helped helped helping
wander wanders wandered wandered wandering
rest rests rested rested resting
build builds built built building
open opens opened opened opening
""".strip().splitlines()

ADJECTIVES = """
good bad happy sad dark bright old young great little beautiful ugly gentle cruel brave wild
sweet bitter dear poor rich strange quiet loud cold warm deep high long short green blue red
white black golden silent holy evil wise foolish proud humble kind angry lonely merry
""".split()

ADVERBS = """
slowly quickly softly gently suddenly quietly happily sadly always never often again soon
together away forward early late almost
""".split()

PROPER = """
london england france paris thames john mary elizabeth henry william
""".split()


def main() -> None:
    rows: dict[str, tuple[str, str]] = {}

    def add(form: str, lemma: str, pos: str) -> None:
        rows.setdefault(form, (lemma, pos))

    for noun in NOUNS:
        add(noun, noun, "NOUN")
    for noun in NOUNS:
        plural = IRREGULAR_PLURALS.get(noun)
        if plural is None:
            plural = noun + ("es" if noun.endswith(("s", "sh", "ch", "x")) else "s")
        add(plural, noun, "NOUN")
    for line in VERBS:
        base, *forms = line.split()
        add(base, base, "VERB")
        for form in forms:
            add(form, base, "VERB")
    for adj in ADJECTIVES:
        add(adj, adj, "ADJ")
    for adv in ADVERBS:
        add(adv, adv, "ADV")
    for name in PROPER:
        add(name, name, "PROPN")

    out = Path(__file__).resolve().parents[1] / "src" / "stylometrics" / "assets" / "lexicon.tsv"
    with out.open("w", encoding="utf-8") as fh:
        fh.write("# form\tlemma\tpos\n")
        for form in sorted(rows):
            lemma, pos = rows[form]
            fh.write(f"{form}\t{lemma}\t{pos}\n")
    print(f"wrote {len(rows)} entries to {out}")


if __name__ == "__main__":
    main()
