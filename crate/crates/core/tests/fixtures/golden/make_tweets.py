"""Writes tweets.jsonl, the golden feature corpus input."""
import json

SAT = 1420891200  # 2015-01-10, Saturday
WED = 1420628768  # 2015-01-07, Wednesday
MON = 1420416000  # 2015-01-05, Monday


def user(verified=False, desc=False, url=False, followers=0, friends=0, statuses=0):
    return {"verified": verified, "has_description": desc, "has_url": url,
            "followers_count": followers, "friends_count": friends,
            "statuses_count": statuses}


rows = [
    ("1", "OMG!! Explosion at #WhiteHouse http://t.co/x @CNN :(", "rumour", WED, False,
     user(followers=42, friends=10, statuses=300), [], [], []),
    ("2", "i think maybe they will win today", "non-rumour", SAT, False,
     user(desc=True), [], [], []),
    ("3", "", "non-rumour", WED, False, user(), [], [], []),
    ("4", "Police confirm two hostages freed in Sydney siege. Very relieved!", "non-rumour", MON, False,
     user(verified=True, desc=True, url=True, followers=250000, friends=120, statuses=50000), [], [], []),
    ("5", "BREAKING: gunman killed at kosher store, reports say https://www.bbc.co.uk/news/123 #ParisAttacks #CharlieHebdo",
     "rumour", SAT, False, user(followers=900, friends=800, statuses=12000), [], [], []),
    ("6", "Is this real??? Can anyone confirm?!", "rumour", WED, False,
     user(followers=15, friends=200, statuses=44), [], [], []),
    ("7", "RT @Reuters: Plane crashed in the French Alps, 150 feared dead", "rumour", MON, True,
     user(desc=True, followers=1200, friends=340, statuses=98), [], [], ["Reuters"]),
    ("8", "$AAPL down 5% after hours lol", "non-rumour", WED, False,
     user(followers=501, friends=3, statuses=7), [], [], []),
    ("9", "soooo sad. thoughts with the victims and their families", "non-rumour", SAT, False,
     user(followers=500, statuses=1), [], [], []),
    ("10", "we are safe, thank you all for your support :) :)", "non-rumour", MON, False,
     user(followers=30, friends=31, statuses=32), [], [], []),
    ("11", "Shots fired near parliament in Ottawa, soldier injured @OttawaPolice @CBCNews", "rumour", WED, False,
     user(verified=True, followers=1000000, friends=500, statuses=90000), [], [], []),
    ("12", "Photos: http://instagram.com/p/abc and www.example.org/x plus https://t.co/short", "non-rumour", SAT, False,
     user(), [], [], []),
    ("13", "URGENT Hostage situation - NYPD on scene. Stay away from the area!!!", "rumour", MON, False,
     user(followers=7000, friends=7000, statuses=7000), [], [], []),
    ("14", "Not sure this is true tbh... idk, waiting for official word", "non-rumour", WED, False,
     user(desc=True, url=True, followers=88), [], [], []),
    ("15", "Terrible terrible news. Really heartbroken :'( #prayforparis", "non-rumour", SAT, False,
     user(followers=12), ["PrayForParis"], [], []),
    ("16", "he said she said, it's their problem now", "non-rumour", MON, False,
     user(statuses=5), [], [], []),
    ("17", "@potus confirms: no threat. Great news, everyone calm down", "non-rumour", WED, False,
     user(), [], [], ["POTUS"]),
    ("18", "Ferguson police chief to resign tonight according to sources http://youtube.com/watch?v=1",
     "rumour", SAT, False, user(followers=2300, friends=150, statuses=400), [], ["https://www.youtube.com/watch?v=1"], []),
    ("19", "12 dead, 11 injured. Suspects still at large. Stay safe Paris État d'urgence", "rumour", MON, False,
     user(verified=True, followers=501, friends=0, statuses=0), [], [], []),
    ("20", "énormes dégâts à #Paris; AMAZING rescue work by firefighters ;-)", "non-rumour", WED, True,
     user(followers=64, friends=64, statuses=64), [], [], []),
]

with open("tweets.jsonl", "w", encoding="utf-8", newline="\n") as f:
    for (tid, text, label, ts, rt, u, tags, urls, mentions) in rows:
        obj = {"id": tid, "text": text, "label": label, "created_at": ts,
               "is_retweet": rt, "user": u, "hashtags": tags, "urls": urls,
               "user_mentions": mentions}
        f.write(json.dumps(obj, ensure_ascii=False) + "\n")
