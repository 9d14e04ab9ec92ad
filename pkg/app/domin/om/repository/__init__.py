"""텍스트 형식(.sv, 유리수 행렬, 스킴 문서)과 내장 fixture 입출력"""
