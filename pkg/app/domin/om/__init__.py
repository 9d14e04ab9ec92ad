"""
방향 매트로이드(OM) 도메인

이 패키지는 부호벡터 시스템에서 표본 압축 스킴까지 이어지는 계산을 포함합니다.
주요 기능:
- 공리 검사와 구조 조회 (topes, cocircuits, rank)
- tope 그래프, 볼록집합, VC 차원
- 단일 원소 확장과 모서리, OM 프로그램
- 재구성 가능 사상과 압축 스킴
"""
