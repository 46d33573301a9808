#!/usr/bin/env python3
"""Regenerates the Peter Rabbit parse bundle and the query bundles.

The AMR graphs are hand-written for the coreference-resolved sentences.
Run from the repository root: `python3 fixtures/build_fixtures.py`.
"""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

# (original, coref_resolved or None when identical, penman)
CHUNK0 = [
    ("The Tale of Peter Rabbit, by Beatrix Potter", None, """
(t / tale
    :topic (p / person :name (n / name :op1 "Peter" :op2 "Rabbit"))
    :ARG1-of (w / write-01
        :ARG0 (p2 / person :name (n2 / name :op1 "Beatrix" :op2 "Potter"))))"""),
    ("Once upon a time there were four little Rabbits, and their names were Flopsy, Mopsy, Cotton-tail, and Peter.",
     "Once upon a time there were four little Rabbits, and the four little Rabbits' names were Flopsy, Mopsy, Cotton-tail, and Peter.", """
(a / and
    :op1 (r / rabbit :quant 4 :mod (l / little))
    :op2 (n / name-01
        :ARG1 r
        :ARG2 (a2 / and
            :op1 (p / person :name (n1 / name :op1 "Flopsy"))
            :op2 (p2 / person :name (n2 / name :op1 "Mopsy"))
            :op3 (p3 / person :name (n3 / name :op1 "Cotton-tail"))
            :op4 (p4 / person :name (n4 / name :op1 "Peter")))))"""),
    ("They lived with their Mother in a sand-bank, underneath the root of a very big fir-tree.",
     "The four little Rabbits lived with the four little Rabbits' Mother in a sand-bank, underneath the root of a very big fir-tree.", """
(l / live-01
    :ARG0 (r / rabbit :quant 4 :mod (l2 / little))
    :accompanier (p / person
        :ARG0-of (h / have-rel-role-91 :ARG1 r :ARG2 (m / mother)))
    :location (s / sand-bank)
    :location (u / underneath
        :op1 (r2 / root
            :part-of (t / fir-tree :mod (b / big :degree (v / very))))))"""),
    ("'Now my dears,' said old Mrs. Rabbit one morning, 'you may go into the fields or down the lane, but don't go into Mr. McGregor's garden: your Father had an accident there; he was put in a pie by Mrs. McGregor.'",
     "'Now my dears,' said old Mrs. Rabbit one morning, 'you may go into the fields or down the lane, but don't go into Mr. McGregor's garden: your Father had an accident in Mr. McGregor's garden; your Father was put in a pie by Mrs. McGregor.'", """
(s / say-01
    :ARG0 (p / person :name (n / name :op1 "Mrs." :op2 "Rabbit") :mod (o / old))
    :ARG1 (c / contrast-01
        :ARG1 (p2 / possible-01
            :ARG1 (g / go-02
                :ARG0 (d / dear)
                :ARG4 (o2 / or :op1 (f / field) :op2 (l / lane))))
        :ARG2 (g2 / go-02 :polarity - :mode imperative
            :ARG0 d
            :ARG4 (g3 / garden :poss (p3 / person :name (n2 / name :op1 "Mr." :op2 "McGregor")))
            :ARG1-of (c2 / cause-01
                :ARG0 (a / and
                    :op1 (h / have-03
                        :ARG0 (p4 / person
                            :ARG0-of (h2 / have-rel-role-91 :ARG1 d :ARG2 (f2 / father)))
                        :ARG1 (a2 / accident)
                        :location g3)
                    :op2 (p5 / put-01
                        :ARG0 (p6 / person :name (n3 / name :op1 "Mrs." :op2 "McGregor"))
                        :ARG1 p4
                        :ARG2 (p7 / pie))))))
    :time (m / morning :mod (o3 / one)))"""),
    ("'Now run along, and don't get into mischief. I am going out.'",
     "'Now run along, and don't get into mischief. Mrs. Rabbit is going out.'", """
(m / multi-sentence
    :snt1 (a / and
        :op1 (r / run-02 :mode imperative
            :ARG0 (y / you)
            :direction (a2 / along)
            :time (n / now))
        :op2 (g / get-03 :polarity - :mode imperative
            :ARG1 y
            :ARG2 (m2 / mischief)))
    :snt2 (g2 / go-out-17
        :ARG0 (p / person :name (n2 / name :op1 "Mrs." :op2 "Rabbit"))))"""),
    ("Then old Mrs. Rabbit took a basket and her umbrella, and went through the wood to the baker's.",
     "Then old Mrs. Rabbit took a basket and old Mrs. Rabbit's umbrella, and went through the wood to the baker's.", """
(a / and
    :op1 (t / take-01
        :ARG0 (p / person :name (n / name :op1 "Mrs." :op2 "Rabbit") :mod (o / old))
        :ARG1 (a2 / and
            :op1 (b / basket)
            :op2 (u / umbrella :poss p)))
    :op2 (g / go-02
        :ARG0 p
        :path (w / wood)
        :ARG4 (b2 / baker))
    :time (t2 / then))"""),
    ("She bought a loaf of brown bread and five currant buns.",
     "Mrs. Rabbit bought a loaf of brown bread and five currant buns.", """
(b / buy-01
    :ARG0 (p / person :name (n / name :op1 "Mrs." :op2 "Rabbit"))
    :ARG1 (a / and
        :op1 (b2 / bread :ARG1-of (b3 / brown-02) :quant (l / loaf))
        :op2 (b4 / bun :quant 5 :mod (c / currant))))"""),
    ("Flopsy, Mopsy, and Cotton-tail, who were good little bunnies, went down the lane to gather blackberries:", None, """
(g / go-02
    :ARG0 (a / and
        :op1 (p / person :name (n / name :op1 "Flopsy"))
        :op2 (p2 / person :name (n2 / name :op1 "Mopsy"))
        :op3 (p3 / person :name (n3 / name :op1 "Cotton-tail"))
        :domain-of (b / bunny :ARG1-of (g2 / good-02) :mod (l / little)))
    :path (l2 / lane)
    :direction (d / down)
    :purpose (g3 / gather-01
        :ARG0 a
        :ARG1 (b2 / blackberry)))"""),
    ("But Peter, who was very naughty, ran straight away to Mr. McGregor's garden, and squeezed under the gate!", None, """
(c / contrast-01
    :ARG2 (a / and
        :op1 (r / run-02
            :ARG0 (p / person :name (n / name :op1 "Peter") :mod (n2 / naughty :degree (v / very)))
            :destination (g / garden :poss (p2 / person :name (n3 / name :op1 "Mr." :op2 "McGregor")))
            :manner (s / straight)
            :time (a2 / away))
        :op2 (s2 / squeeze-01
            :ARG0 p
            :path (u / under :op1 (g2 / gate)))))"""),
    ("First he ate some lettuces and some French beans; and then he ate some radishes;",
     "First Peter ate some lettuces and some French beans; and then Peter ate some radishes;", """
(a / and
    :op1 (e / eat-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (a2 / and
            :op1 (l / lettuce :quant (s / some))
            :op2 (b / bean :quant (s2 / some) :mod (c / country :name (n2 / name :op1 "France"))))
        :time (f / first))
    :op2 (e2 / eat-01
        :ARG0 p
        :ARG1 (r / radish :quant (s3 / some))
        :time (t / then)))"""),
    ("And then, feeling rather sick, he went to look for some parsley.",
     "And then, feeling rather sick, Peter went to look for some parsley.", """
(g / go-02
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :purpose (l / look-01
        :ARG0 p
        :ARG1 (p2 / parsley :quant (s / some)))
    :time (t / then)
    :ARG1-of (c / cause-01
        :ARG0 (f / feel-01
            :ARG0 p
            :ARG1 (s2 / sick-05 :ARG1 p :degree (r / rather)))))"""),
    ("But round the end of a cucumber frame, whom should he meet but Mr. McGregor!",
     "But round the end of a cucumber frame, whom should Peter meet but Mr. McGregor!", """
(c / contrast-01
    :ARG2 (m / meet-02
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (p2 / person :name (n2 / name :op1 "Mr." :op2 "McGregor"))
        :location (r / round
            :op1 (e / end
                :part-of (f / frame :mod (c2 / cucumber))))))"""),
    ("Mr. McGregor was on his hands and knees planting out young cabbages, but he jumped up and ran after Peter, waving a rake and calling out, 'Stop thief!'",
     "Mr. McGregor was on Mr. McGregor's hands and knees planting out young cabbages, but Mr. McGregor jumped up and ran after Peter, waving a rake and calling out, 'Stop thief!'", """
(c / contrast-01
    :ARG1 (p / plant-01
        :ARG0 (p2 / person :name (n / name :op1 "Mr." :op2 "McGregor"))
        :ARG1 (c2 / cabbage :mod (y / young))
        :manner (a / and
            :op1 (h / hand :part-of p2)
            :op2 (k / knee :part-of p2)))
    :ARG2 (a2 / and
        :op1 (j / jump-03 :ARG0 p2 :direction (u / up))
        :op2 (c4 / chase-01
            :ARG0 p2
            :ARG1 (p3 / person :name (n2 / name :op1 "Peter"))
            :manner (a3 / and
                :op1 (w / wave-01 :ARG0 p2 :ARG1 (r2 / rake))
                :op2 (c3 / call-out-04
                    :ARG0 p2
                    :ARG1 (s / stop-01 :mode imperative
                        :ARG0 (t / thief)))))))"""),
    ("Peter was most dreadfully frightened; he rushed all over the garden, for he had forgotten the way back to the gate.",
     "Peter was most dreadfully frightened; Peter rushed all over the garden, for Peter had forgotten the way back to the gate.", """
(a / and
    :op1 (f / frighten-01
        :ARG1 (p / person :name (n / name :op1 "Peter"))
        :degree (m / most)
        :manner (d / dreadful))
    :op2 (r / rush-01
        :ARG0 p
        :location (g / garden :mod (a2 / all-over))
        :ARG1-of (c / cause-01
            :ARG0 (f2 / forget-01
                :ARG0 p
                :ARG1 (w / way
                    :direction (b / back)
                    :destination (g2 / gate))))))"""),
    ("He lost one of his shoes among the cabbages, and the other shoe amongst the potatoes.",
     "Peter lost one of Peter's shoes among the cabbages, and the other shoe amongst the potatoes.", """
(a / and
    :op1 (l / lose-02
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (s / shoe :quant 1 :poss p)
        :location (c / cabbage))
    :op2 (l2 / lose-02
        :ARG0 p
        :ARG1 (s2 / shoe :mod (o / other))
        :location (p2 / potato)))"""),
    ("After losing them, he ran on four legs and went faster, so that I think he might have got away altogether if he had not unfortunately run into a gooseberry net, and got caught by the large buttons on his jacket.",
     "After losing Peter's shoes, Peter ran on four legs and went faster, so that I think Peter might have got away altogether if Peter had not unfortunately run into a gooseberry net, and got caught by the large buttons on Peter's jacket.", """
(a / and
    :op1 (r / run-02
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :instrument (l / leg :quant 4)
        :time (a2 / after
            :op1 (l2 / lose-02 :ARG0 p :ARG1 (s / shoe :poss p))))
    :op2 (g / go-02
        :ARG0 p
        :manner (f / fast :degree (m / more)))
    :op3 (t / think-01
        :ARG0 (i / i)
        :ARG1 (p2 / possible-01
            :ARG1 (g2 / get-05
                :ARG1 p
                :ARG2 (a3 / away)
                :degree (a4 / altogether))
            :condition (a5 / and :polarity -
                :op1 (r2 / run-01
                    :ARG0 p
                    :destination (n2 / net :mod (g3 / gooseberry))
                    :ARG1-of (f2 / fortunate-01 :polarity -))
                :op2 (c / catch-01
                    :ARG1 p
                    :ARG0 (b / button
                        :mod (l3 / large)
                        :location (j / jacket :poss p)))))))"""),
    ("It was a blue jacket with brass buttons, quite new.",
     "Peter's jacket was a blue jacket with brass buttons, quite new.", """
(j / jacket
    :mod (b / blue)
    :poss (p / person :name (n / name :op1 "Peter"))
    :part (b2 / button :mod (b3 / brass))
    :ARG1-of (n2 / new-01 :degree (q / quite)))"""),
    ("Peter gave himself up for lost, and shed big tears; but his sobs were overheard by some friendly sparrows, who flew to him in great excitement, and implored him to exert himself.",
     "Peter gave Peter up for lost, and shed big tears; but Peter's sobs were overheard by some friendly sparrows, who flew to Peter in great excitement, and implored Peter to exert Peter.", """
(c / contrast-01
    :ARG1 (a / and
        :op1 (g / give-up-07
            :ARG0 (p / person :name (n / name :op1 "Peter"))
            :ARG1 p
            :ARG2 (l / lose-02 :ARG1 p))
        :op2 (s / shed-01
            :ARG0 p
            :ARG1 (t / tear :mod (b / big))))
    :ARG2 (o / overhear-01
        :ARG0 (s2 / sparrow :quant (s3 / some) :mod (f / friendly))
        :ARG1 (s4 / sob-01 :ARG0 p)
        :time (a2 / and
            :op1 (f2 / fly-01
                :ARG1 s2
                :destination p
                :manner (e / excite-01 :ARG1 s2 :degree (g2 / great)))
            :op2 (i / implore-01
                :ARG0 s2
                :ARG1 p
                :ARG2 (e2 / exert-01 :ARG0 p :ARG1 p)))))"""),
    ("Mr. McGregor came up with a sieve, which he intended to pop upon the top of Peter; but Peter wriggled out just in time, leaving his jacket behind him.",
     "Mr. McGregor came up with a sieve, which Mr. McGregor intended to pop upon the top of Peter; but Peter wriggled out just in time, leaving Peter's jacket behind Peter.", """
(c / contrast-01
    :ARG1 (c2 / come-up-11
        :ARG1 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
        :accompanier (s / sieve
            :ARG1-of (p2 / pop-01
                :ARG0 p
                :destination (t / top :part-of (p3 / person :name (n2 / name :op1 "Peter")))
                :ARG1-of (i / intend-01 :ARG0 p))))
    :ARG2 (w / wriggle-01
        :ARG0 p3
        :direction (o / out)
        :time (t2 / time :mod (j / just))
        :manner (l / leave-14
            :ARG0 p3
            :ARG1 (j2 / jacket :poss p3)
            :location (b / behind :op1 p3))))"""),
    ("And rushed into the tool-shed, and jumped into a can.",
     "And Peter rushed into the tool-shed, and jumped into a can.", """
(a / and
    :op1 (r / rush-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :destination (t / tool-shed))
    :op2 (j / jump-03
        :ARG0 p
        :destination (c / can)))"""),
    ("It would have been a beautiful thing to hide in, if it had not had so much water in it.",
     "The can would have been a beautiful thing to hide in, if the can had not had so much water in the can.", """
(t / thing
    :ARG1-of (b / beautiful-02)
    :location-of (h / hide-01)
    :domain (c / can)
    :condition (h2 / have-03 :polarity -
        :ARG0 c
        :ARG1 (w / water :quant (m / much :degree (s / so)))))"""),
    ("Mr. McGregor was quite sure that Peter was somewhere in the tool-shed, perhaps hidden underneath a flower-pot.", None, """
(s / sure-02
    :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
    :ARG1 (a / and
        :op1 (s2 / somewhere
            :location (t / tool-shed)
            :domain (p2 / person :name (n2 / name :op1 "Peter")))
        :op2 (h / hide-01
            :ARG1 p2
            :location (u / underneath :op1 (f / flower-pot))
            :mod (p3 / perhaps)))
    :degree (q / quite))"""),
    ("He began to turn them over carefully, looking under each.",
     "Mr. McGregor began to turn the flower-pots over carefully, looking under each flower-pot.", """
(b / begin-01
    :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
    :ARG1 (t / turn-over-12
        :ARG0 p
        :ARG1 (f / flower-pot)
        :manner (c / care-04)
        :manner (l / look-01
            :ARG0 p
            :location (u / under :op1 (f2 / flower-pot :mod (e / each))))))"""),
    ("Presently Peter sneezed—'Kertyschoo!'", None, """
(s / sneeze-01
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :time (p2 / presently))"""),
    ("Mr. McGregor was after him in no time.",
     "Mr. McGregor was after Peter in no time.", """
(c / chase-01
    :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
    :ARG1 (p2 / person :name (n2 / name :op1 "Peter"))
    :time (t / time :quant (n3 / no)))"""),
    ("And tried to put his foot upon Peter, who jumped out of a window, upsetting three plants.",
     "And Mr. McGregor tried to put Mr. McGregor's foot upon Peter, who jumped out of a window, upsetting three plants.", """
(t / try-01
    :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
    :ARG1 (p2 / put-01
        :ARG0 p
        :ARG1 (f / foot :part-of p)
        :ARG2 (p3 / person :name (n2 / name :op1 "Peter")
            :ARG0-of (j / jump-03
                :source (w / window)
                :ARG0-of (u / upset-01
                    :ARG1 (p4 / plant :quant 3))))))"""),
    ("The window was too small for Mr. McGregor, and he was tired of running after Peter.",
     "The window was too small for Mr. McGregor, and Mr. McGregor was tired of running after Peter.", """
(a / and
    :op1 (s / small
        :domain (w / window)
        :degree (t / too)
        :beneficiary (p / person :name (n / name :op1 "Mr." :op2 "McGregor")))
    :op2 (t2 / tire-01
        :ARG1 p
        :ARG0 (c / chase-01
            :ARG0 p
            :ARG1 (p2 / person :name (n2 / name :op1 "Peter")))))"""),
    ("He went back to his work.",
     "Mr. McGregor went back to Mr. McGregor's work.", """
(g / go-02
    :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
    :direction (b / back)
    :ARG4 (w / work-01 :ARG0 p))"""),
    ("Peter sat down to rest; he was out of breath and trembling with fright, and he had not the least idea which way to go.",
     "Peter sat down to rest; Peter was out of breath and trembling with fright, and Peter had not the least idea which way to go.", """
(a / and
    :op1 (s / sit-01
        :ARG1 (p / person :name (n / name :op1 "Peter"))
        :direction (d / down)
        :purpose (r / rest-01 :ARG1 p))
    :op2 (b / breathe-01 :polarity - :ARG0 p)
    :op3 (t / tremble-01
        :ARG0 p
        :ARG1-of (c / cause-01 :ARG0 (f / fear-01 :ARG0 p)))
    :op4 (k / know-01 :polarity -
        :ARG0 p
        :ARG1 (w / way :ARG4-of (g / go-02 :ARG0 p))
        :degree (l / least)))"""),
    ("Also he was very damp with sitting in that can.",
     "Also Peter was very damp with sitting in that can.", """
(d / damp
    :domain (p / person :name (n / name :op1 "Peter"))
    :degree (v / very)
    :mod (a / also)
    :ARG1-of (c / cause-01
        :ARG0 (s / sit-01
            :ARG1 p
            :location (c2 / can :mod (t / that)))))"""),
    ("After a time he began to wander about, going lippity—lippity—not very fast, and looking all round.",
     "After a time Peter began to wander about, going lippity—lippity—not very fast, and looking all round.", """
(b / begin-01
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (w / wander-01
        :ARG0 p
        :direction (a / about)
        :manner (a2 / and
            :op1 (g / go-02
                :ARG0 p
                :manner (l / lippity)
                :ARG1-of (f / fast-02 :polarity - :degree (v / very)))
            :op2 (l2 / look-01
                :ARG0 p
                :location (a3 / all-round))))
    :time (a4 / after :op1 (t / time)))"""),
    ("He found a door in a wall; but it was locked, and there was no room for a fat little rabbit to squeeze underneath.",
     "Peter found a door in a wall; but the door was locked, and there was no room for a fat little rabbit to squeeze underneath.", """
(c / contrast-01
    :ARG1 (f / find-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (d / door :location (w / wall)))
    :ARG2 (a / and
        :op1 (l / lock-01 :ARG1 d)
        :op2 (r / room :polarity -
            :purpose (s / squeeze-01
                :ARG0 (r2 / rabbit :mod (f2 / fat) :mod (l2 / little))
                :path (u / underneath)))))"""),
    ("An old mouse was running in and out over the stone doorstep, carrying peas and beans to her family in the wood.",
     "An old mouse was running in and out over the stone doorstep, carrying peas and beans to the old mouse's family in the wood.", """
(r / run-02
    :ARG0 (m / mouse :mod (o / old))
    :direction (a / and :op1 (i / in) :op2 (o2 / out))
    :path (d / doorstep :consist-of (s / stone))
    :manner (c / carry-01
        :ARG0 m
        :ARG1 (a2 / and :op1 (p / pea) :op2 (b / bean))
        :destination (f / family
            :poss m
            :location (w / wood))))"""),
    ("Peter asked her the way to the gate, but she had such a large pea in her mouth that she could not answer.",
     "Peter asked the old mouse the way to the gate, but the old mouse had such a large pea in the old mouse's mouth that the old mouse could not answer.", """
(c / contrast-01
    :ARG1 (a / ask-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (w / way :destination (g / gate))
        :ARG2 (m / mouse :mod (o / old)))
    :ARG2 (h / have-03
        :ARG0 m
        :ARG1 (p2 / pea :mod (l / large :degree (s / such)))
        :location (m2 / mouth :part-of m)
        :ARG0-of (c2 / cause-01
            :ARG1 (p3 / possible-01 :polarity -
                :ARG1 (a2 / answer-01 :ARG0 m)))))"""),
    ("She only shook her head at him.",
     "The old mouse only shook the old mouse's head at Peter.", """
(s / shake-01
    :ARG0 (m / mouse :mod (o / old))
    :ARG1 (h / head :part-of m)
    :direction (p / person :name (n / name :op1 "Peter"))
    :mod (o2 / only))"""),
    ("Peter began to cry.", None, """
(b / begin-01
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (c / cry-02 :ARG0 p))"""),
    ("Then he tried to find his way straight across the garden, but he became more and more puzzled.",
     "Then Peter tried to find Peter's way straight across the garden, but Peter became more and more puzzled.", """
(c / contrast-01
    :ARG1 (t / try-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (f / find-01
            :ARG0 p
            :ARG1 (w / way
                :poss p
                :path (a / across :op1 (g / garden))
                :manner (s / straight)))
        :time (t2 / then))
    :ARG2 (b / become-01
        :ARG1 p
        :ARG2 (p2 / puzzle-01 :ARG1 p :degree (m / more-and-more))))"""),
    ("Presently, he came to a pond where Mr. McGregor filled his water-cans.",
     "Presently, Peter came to a pond where Mr. McGregor filled Mr. McGregor's water-cans.", """
(c / come-01
    :ARG1 (p / person :name (n / name :op1 "Peter"))
    :ARG4 (p2 / pond
        :location-of (f / fill-01
            :ARG0 (p3 / person :name (n2 / name :op1 "Mr." :op2 "McGregor"))
            :ARG1 (w / water-can :poss p3)))
    :time (p4 / presently))"""),
    ("A white cat was staring at some gold-fish, she sat very, very still, but now and then the tip of her tail twitched as if it were alive.",
     "A white cat was staring at some gold-fish, the white cat sat very, very still, but now and then the tip of the white cat's tail twitched as if the tip were alive.", """
(c / contrast-01
    :ARG1 (a / and
        :op1 (s / stare-01
            :ARG0 (c2 / cat :ARG1-of (w / white-03))
            :ARG1 (g / goldfish :quant (s2 / some)))
        :op2 (s3 / sit-01
            :ARG1 c2
            :manner (s4 / still :degree (v / very))))
    :ARG2 (t / twitch-01
        :ARG1 (t2 / tip :part-of (t3 / tail :part-of c2))
        :frequency (n / now-and-then)
        :manner (l / live-01 :ARG0 t2)))"""),
    ("Peter thought it best to go away without speaking to her; he had heard about cats from his cousin, little Benjamin Bunny.",
     "Peter thought it best to go away without speaking to the white cat; Peter had heard about cats from Peter's cousin, little Benjamin Bunny.", """
(a / and
    :op1 (t / think-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (g / good-02
            :ARG1 (g2 / go-02
                :ARG0 p
                :direction (a2 / away)
                :manner (s / speak-01 :polarity -
                    :ARG0 p
                    :ARG2 (c / cat :ARG1-of (w / white-03))))
            :degree (m / most)))
    :op2 (h / hear-01
        :ARG0 p
        :ARG1 (c2 / cat)
        :ARG2 (p2 / person
            :name (n2 / name :op1 "Benjamin" :op2 "Bunny")
            :mod (l / little)
            :ARG0-of (h2 / have-rel-role-91 :ARG1 p :ARG2 (c3 / cousin)))))"""),
    ("He went back towards the tool-shed, but suddenly, quite close to him, he heard the noise of a hoe—scr-r-ritch, scratch, scratch, scritch.",
     "Peter went back towards the tool-shed, but suddenly, quite close to Peter, Peter heard the noise of a hoe—scr-r-ritch, scratch, scratch, scritch.", """
(c / contrast-01
    :ARG1 (g / go-02
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :direction (b / back)
        :ARG4 (t / tool-shed))
    :ARG2 (h / hear-01
        :ARG0 p
        :ARG1 (n2 / noise
            :source (h2 / hoe)
            :example (s / scratch))
        :manner (s2 / sudden)
        :location (c2 / close-10 :ARG1 p :degree (q / quite))))"""),
    ("Peter scuttered underneath the bushes.", None, """
(s / scutter-01
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :location (u / underneath :op1 (b / bush)))"""),
    ("But presently, as nothing happened, he came out, and climbed upon a wheelbarrow and peeped over.",
     "But presently, as nothing happened, Peter came out, and climbed upon a wheelbarrow and peeped over.", """
(c / contrast-01
    :ARG2 (a / and
        :op1 (c2 / come-out-09 :ARG1 (p / person :name (n / name :op1 "Peter")))
        :op2 (c3 / climb-01 :ARG0 p :destination (w / wheelbarrow))
        :op3 (p2 / peep-01 :ARG0 p :direction (o / over))
        :ARG1-of (c4 / cause-01
            :ARG0 (h / happen-01 :ARG1 (n2 / nothing)))
        :time (p3 / presently)))"""),
    ("The first thing he saw was Mr. McGregor hoeing onions.",
     "The first thing Peter saw was Mr. McGregor hoeing onions.", """
(s / see-01
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (h / hoe-01
        :ARG0 (p2 / person :name (n2 / name :op1 "Mr." :op2 "McGregor"))
        :ARG1 (o / onion))
    :ord (o2 / ordinal-entity :value 1))"""),
    ("His back was turned towards Peter, and beyond him was the gate!",
     "Mr. McGregor's back was turned towards Peter, and beyond Mr. McGregor was the gate!", """
(a / and
    :op1 (t / turn-01
        :ARG1 (b / back :part-of (p / person :name (n / name :op1 "Mr." :op2 "McGregor")))
        :direction (p2 / person :name (n2 / name :op1 "Peter")))
    :op2 (b2 / be-located-at-91
        :ARG1 (g / gate)
        :ARG2 (b3 / beyond :op1 p)))"""),
]

CHUNK1 = [
    ("Peter got down very quietly off the wheelbarrow, and started running as fast as he could go, along a straight walk behind some black-currant bushes.",
     "Peter got down very quietly off the wheelbarrow, and started running as fast as Peter could go, along a straight walk behind some black-currant bushes.", """
(a / and
    :op1 (g / get-05
        :ARG1 (p / person :name (n / name :op1 "Peter"))
        :ARG2 (d / down)
        :source (w / wheelbarrow)
        :manner (q / quiet-04 :degree (v / very)))
    :op2 (s / start-01
        :ARG0 p
        :ARG1 (r / run-02
            :ARG0 p
            :path (w2 / walk
                :ARG1-of (s2 / straight-04)
                :location (b / behind
                    :op1 (b2 / bush :quant (s3 / some) :mod (b3 / black-currant))))
            :manner (f / fast-02 :degree (m / most)))))"""),
    ("Mr. McGregor caught sight of him at the corner, but Peter did not care.",
     "Mr. McGregor caught sight of Peter at the corner, but Peter did not care.", """
(c / contrast-01
    :ARG1 (s / see-01
        :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
        :ARG1 (p2 / person :name (n2 / name :op1 "Peter"))
        :location (c2 / corner))
    :ARG2 (c3 / care-01 :polarity - :ARG0 p2))"""),
    ("He slipped underneath the gate, and was safe at last in the wood outside the garden.",
     "Peter slipped underneath the gate, and was safe at last in the wood outside the garden.", """
(a / and
    :op1 (s / slip-01
        :ARG1 (p / person :name (n / name :op1 "Peter"))
        :path (u / underneath :op1 (g / gate)))
    :op2 (s2 / safe-01
        :ARG1 p
        :location (w / wood :location (o / outside :op1 (g2 / garden)))
        :time (a2 / at-last)))"""),
    ("Mr. McGregor hung up the little jacket and the shoes for a scare-crow to frighten the blackbirds.", None, """
(h / hang-up-04
    :ARG0 (p / person :name (n / name :op1 "Mr." :op2 "McGregor"))
    :ARG1 (a / and
        :op1 (j / jacket :mod (l / little))
        :op2 (s / shoe))
    :purpose (s2 / scarecrow
        :ARG0-of (f / frighten-01
            :ARG1 (b / blackbird))))"""),
    ("Peter never stopped running or looked behind him till he got home to the big fir-tree.",
     "Peter never stopped running or looked behind Peter till Peter got home to the big fir-tree.", """
(o / or :polarity -
    :op1 (s / stop-01
        :ARG0 (p / person :name (n / name :op1 "Peter"))
        :ARG1 (r / run-02 :ARG0 p)
        :time (e / ever))
    :op2 (l / look-01
        :ARG0 p
        :direction (b / behind :op1 p))
    :time (u / until
        :op1 (g / get-05
            :ARG1 p
            :ARG2 (h / home)
            :destination (f / fir-tree :mod (b2 / big)))))"""),
    ("He was so tired that he flopped down upon the nice soft sand on the floor of the rabbit-hole and shut his eyes.",
     "Peter was so tired that Peter flopped down upon the nice soft sand on the floor of the rabbit-hole and shut Peter's eyes.", """
(t / tire-01
    :ARG1 (p / person :name (n / name :op1 "Peter"))
    :degree (s / so)
    :ARG0-of (c / cause-01
        :ARG1 (a / and
            :op1 (f / flop-01
                :ARG1 p
                :direction (d / down)
                :destination (s2 / sand
                    :ARG1-of (n2 / nice-01)
                    :ARG1-of (s3 / soft-02)
                    :location (f2 / floor :part-of (r / rabbit-hole))))
            :op2 (s4 / shut-01
                :ARG0 p
                :ARG1 (e / eye :part-of p)))))"""),
    ("His mother was busy cooking; she wondered what he had done with his clothes.",
     "Peter's mother was busy cooking; Peter's mother wondered what Peter had done with Peter's clothes.", """
(a / and
    :op1 (b / busy-01
        :ARG1 (p / person
            :ARG0-of (h / have-rel-role-91
                :ARG1 (p2 / person :name (n / name :op1 "Peter"))
                :ARG2 (m / mother)))
        :ARG2 (c / cook-01 :ARG0 p))
    :op2 (w / wonder-01
        :ARG0 p
        :ARG1 (t / thing
            :ARG1-of (d / do-02
                :ARG0 p2
                :ARG2 (c2 / clothes :poss p2)))))"""),
    ("It was the second little jacket and pair of shoes that Peter had lost in a fortnight!",
     "Peter's clothes was the second little jacket and pair of shoes that Peter had lost in a fortnight!", """
(l / lose-02
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (a / and
        :op1 (j / jacket :mod (l2 / little) :ord (o / ordinal-entity :value 2))
        :op2 (p2 / pair :consist-of (s / shoe)))
    :duration (t / temporal-quantity :quant 1 :unit (f / fortnight)))"""),
    ("I am sorry to say that Peter was not very well during the evening.", None, """
(s / sorry-01
    :ARG1 (i / i)
    :ARG2 (s2 / say-01
        :ARG0 i
        :ARG1 (w / well-09 :polarity -
            :ARG1 (p / person :name (n / name :op1 "Peter"))
            :degree (v / very)
            :time (e / evening))))"""),
    ("His mother put him to bed, and made some camomile tea; and she gave a dose of it to Peter!",
     "Peter's mother put Peter to bed and made some camomile tea; and Peter's mother gave a dose of some camomile tea to Peter!", None),
    ("'One table-spoonful to be taken at bed-time.'", None, """
(t / take-01
    :ARG1 (t2 / tablespoonful :quant 1)
    :time (b / bedtime))"""),
    ("But Flopsy, Mopsy, and Cotton-tail had bread and milk and blackberries for supper.", None, """
(c / contrast-01
    :ARG2 (h / have-03
        :ARG0 (a / and
            :op1 (p / person :name (n / name :op1 "Flopsy"))
            :op2 (p2 / person :name (n2 / name :op1 "Mopsy"))
            :op3 (p3 / person :name (n3 / name :op1 "Cotton-tail")))
        :ARG1 (a2 / and
            :op1 (b / bread)
            :op2 (m / milk)
            :op3 (b2 / blackberry))
        :purpose (s / supper)))"""),
]

QUESTIONS = [
    ("q1_father", "What happened to the young rabbits' father?",
     ["Mrs. McGregor baked him into a pie.", "He was put in a pie by Mrs. McGregor."], ["text_0-3"], """
(h / happen-01
    :ARG1 (a / amr-unknown)
    :ARG2 (p / person
        :ARG0-of (h2 / have-rel-role-91
            :ARG1 (r / rabbit :mod (y / young))
            :ARG2 (f / father))))"""),
    ("q2_dinner", "What does Peter have for dinner after getting back home?",
     ["Chamomile tea", "camomile tea"], ["text_1-9"], """
(h / have-03
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (a / amr-unknown)
    :purpose (d / dinner)
    :time (a2 / after
        :op1 (g / get-05
            :ARG1 p
            :ARG2 (h2 / home)
            :direction (b / back))))"""),
    ("q3_clothing", "Where does Peter see his lost clothing?",
     ["On McGregor's scarecrow", "on a scare-crow in Mr. McGregor's garden"], ["text_1-3"], """
(s / see-01
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (c / clothing
        :poss p
        :ARG1-of (l / lose-02 :ARG0 p))
    :location (a / amr-unknown))"""),
    ("q4_baker", "What did old Mrs. Rabbit buy at the baker's?",
     ["A loaf of brown bread and five currant buns."], ["text_0-6"], """
(b / buy-01
    :ARG0 (p / person :name (n / name :op1 "Mrs." :op2 "Rabbit") :mod (o / old))
    :ARG1 (a / amr-unknown)
    :location (b2 / baker))"""),
    ("q5_cucumber", "Whom did Peter meet round the end of a cucumber frame?",
     ["Mr. McGregor"], ["text_0-11"], """
(m / meet-02
    :ARG0 (p / person :name (n / name :op1 "Peter"))
    :ARG1 (a / amr-unknown)
    :location (r / round
        :op1 (e / end
            :part-of (f / frame :mod (c / cucumber)))))"""),
]


def bedtime_amr():
    with open(os.path.join(HERE, "bedtime_amr.jsonl")) as f:
        for line in f:
            rec = json.loads(line)
            if rec["kind"] == "amr":
                return rec["penman"]
    raise SystemExit("bedtime_amr.jsonl has no amr record")


def sentence(doc_id, chunk, sent, original, coref):
    return {
        "kind": "sentence",
        "doc_id": doc_id,
        "chunk_index": chunk,
        "sent_index": sent,
        "original": original,
        "normalized": " ".join(original.split()),
        "coref_resolved": coref or original,
    }


def write_jsonl(path, records):
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    records = [{"kind": "provenance", "note": "hand-written AMR for the coreference-resolved sentences"}]
    for chunk, rows in enumerate([CHUNK0, CHUNK1]):
        for sent, (original, coref, penman) in enumerate(rows):
            records.append(sentence("peter_rabbit", chunk, sent, original, coref))
            penman = bedtime_amr() if penman is None else penman.strip()
            records.append({"kind": "amr", "text_id": f"text_{chunk}-{sent}", "penman": penman})
    write_jsonl(os.path.join(HERE, "peter_rabbit_amr.jsonl"), records)

    os.makedirs(os.path.join(HERE, "queries"), exist_ok=True)
    questions = []
    for qid, question, answers, gold, penman in QUESTIONS:
        write_jsonl(os.path.join(HERE, "queries", f"{qid}.jsonl"), [
            sentence("query", 0, 0, question, None),
            {"kind": "amr", "text_id": "text_0-0", "penman": penman.strip()},
        ])
        questions.append({
            "id": qid,
            "question": question,
            "query_parse": f"queries/{qid}.jsonl",
            "answers": answers,
            "gold_text_ids": gold,
        })
    write_jsonl(os.path.join(HERE, "peter_rabbit_questions.jsonl"), questions)


if __name__ == "__main__":
    main()
