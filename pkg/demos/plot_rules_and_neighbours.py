"""
Rules and neighbours on a three-session corpus
==============================================

Fits the two rule learners and the neighbourhood models on a tiny corpus so
every number printed below can be checked by hand.
"""

from sbrbench.algorithms import AR, SR, SKNN, VSTAN
from sbrbench.corpus import Session, from_sequences

# items a, b, c, d as 0..3; sessions end on consecutive days
a, b, c, d = 0, 1, 2, 3
train = from_sequences([[a, b, c], [a, b, d], [b, c, d]])

# association rules count every pair of positions in a session, both ways
ar = AR().fit(train)
print("AR weights from b:", ar.table_.row(b))

# sequential rules only look forward, and halve the weight at distance two
sr = SR().fit(train)
print("SR weights from b:", sr.table_.row(b))

# a user who has just clicked a then b, one day after the last training session
now = train.last_time + 86400
prefix = Session(99, (a, b), (now - 1, now))
print("AR   ->", ar.predict(prefix, 3))
print("SR   ->", sr.predict(prefix, 3))

# neighbourhood models: SKNN sums cosine similarities of sessions holding an item,
# VSTAN adds position, recency and popularity (idf) adjustments
for model in (SKNN(k_neighbors=3, sample_size=3), VSTAN(k_neighbors=3, sample_size=3)):
    model.fit(train)
    print(type(model).__name__, "->", model.predict(prefix, 3))
